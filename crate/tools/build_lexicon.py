"""Expand tools/synonym_groups.txt into crates/core/resources/lexicon.tsv.

Every word in a group lists every other word of the group; a word that
appears in several groups gets the union, in first-seen order.
"""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
src = root / "tools" / "synonym_groups.txt"
dst = root / "crates" / "core" / "resources" / "lexicon.tsv"

entries = {}
for line in src.read_text().splitlines():
    line = line.strip()
    if not line or line.startswith("#"):
        continue
    words = []
    for w in line.split():
        w = w.lower()
        if w not in words:
            words.append(w)
    if len(words) < 2:
        continue
    for w in words:
        syns = entries.setdefault(w, [])
        for o in words:
            if o != w and o not in syns:
                syns.append(o)

with dst.open("w", newline="\n") as f:
    f.write("# synonym lexicon v1: token<TAB>comma-separated synonyms\n")
    for w in sorted(entries):
        f.write(f"{w}\t{','.join(entries[w])}\n")
print(f"{len(entries)} entries -> {dst}")
