//! File formats: documents (JSONL or TSV), prediction tensors (JSONL),
//! the synonym lexicon and the keyboard adjacency layout (TSV).
//!
//! All readers accept LF or CRLF line endings and report failures with the
//! offending line number.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::augment::tokenize::{lowercase, tokenize, TokenKind};
use crate::error::{Error, Result};
use crate::types::{Document, LabelSet, PredictionTensor, ProbVector};

const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon.tsv");
const BUNDLED_QWERTY: &str = include_str!("../resources/qwerty.tsv");

/// Header line of the TSV document format.
pub const TSV_HEADER: &str = "id\ttitle\tpost\tlabel";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DocFormat {
    #[default]
    Jsonl,
    Tsv,
}

impl DocFormat {
    /// `.tsv` selects TSV; anything else is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => DocFormat::Tsv,
            _ => DocFormat::Jsonl,
        }
    }
}

impl FromStr for DocFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(DocFormat::Jsonl),
            "tsv" => Ok(DocFormat::Tsv),
            other => Err(Error::Config(format!("unknown document format {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    post: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = (usize, Result<String>)> + '_> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file).lines().enumerate().map(move |(i, line)| {
        let line = line
            .map(|l| l.strip_suffix('\r').map(str::to_owned).unwrap_or(l))
            .map_err(|e| Error::io(path, e));
        (i + 1, line)
    }))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Reads documents in file order, validating labels against `labels`.
pub fn load_documents(path: &Path, format: DocFormat, labels: &LabelSet) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    let mut header_seen = false;
    for (line_no, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, title, post, label) = match format {
            DocFormat::Jsonl => {
                let rec: DocumentRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(path, line_no, format!("malformed record: {e}")))?;
                (rec.id, rec.title, rec.post, rec.label)
            }
            DocFormat::Tsv => {
                if !header_seen {
                    header_seen = true;
                    if line != TSV_HEADER {
                        return Err(Error::parse(path, line_no, format!("expected header {TSV_HEADER:?}")));
                    }
                    continue;
                }
                let cols: Vec<&str> = line.split('\t').collect();
                if cols.len() != 4 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected 4 tab-separated columns, found {}", cols.len()),
                    ));
                }
                let label = (!cols[3].is_empty()).then(|| tsv_unescape(cols[3]));
                (tsv_unescape(cols[0]), tsv_unescape(cols[1]), tsv_unescape(cols[2]), label)
            }
        };
        if let Some(label) = &label {
            if labels.index_of(label).is_none() {
                return Err(Error::parse(path, line_no, format!("unknown label {label:?}")));
            }
        }
        if !ids.insert(id.clone()) {
            return Err(Error::parse(path, line_no, format!("duplicate document id {id:?}")));
        }
        let doc =
            Document::new(id, title, post, label).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Writes documents in the given format.
pub fn save_documents(docs: &[Document], path: &Path, format: DocFormat) -> Result<()> {
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    if format == DocFormat::Tsv {
        writeln!(out, "{TSV_HEADER}").map_err(io)?;
    }
    for doc in docs {
        match format {
            DocFormat::Jsonl => {
                let rec = DocumentRecord {
                    id: doc.id().to_owned(),
                    title: doc.title().to_owned(),
                    post: doc.body().to_owned(),
                    label: doc.label().map(str::to_owned),
                };
                serde_json::to_writer(&mut out, &rec)?;
                writeln!(out).map_err(io)?;
            }
            DocFormat::Tsv => {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    tsv_escape(doc.id()),
                    tsv_escape(doc.title()),
                    tsv_escape(doc.body()),
                    tsv_escape(doc.label().unwrap_or(""))
                )
                .map_err(io)?;
            }
        }
    }
    out.flush().map_err(io)
}

/// Tabs, newlines and backslashes are written as `\t`, `\n`, `\r`, `\\`.
fn tsv_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn tsv_unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// One line of the prediction interchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub model_id: String,
    pub sample_id: String,
    pub probs: Vec<f64>,
}

/// Reads a prediction JSONL file into a dense tensor. Models and samples
/// keep their first-appearance order.
pub fn load_predictions(path: &Path, labels: &LabelSet) -> Result<PredictionTensor> {
    let mut model_ids: Vec<String> = Vec::new();
    let mut sample_ids: Vec<String> = Vec::new();
    let mut model_index: HashMap<String, usize> = HashMap::new();
    let mut sample_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), ProbVector> = HashMap::new();

    for (line_no, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, line_no, format!("malformed record: {e}")))?;
        if rec.probs.len() != labels.len() {
            return Err(Error::parse(
                path,
                line_no,
                format!("{} probabilities for {} classes", rec.probs.len(), labels.len()),
            ));
        }
        let p = ProbVector::new(rec.probs).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let m = *model_index.entry(rec.model_id.clone()).or_insert_with(|| {
            model_ids.push(rec.model_id.clone());
            model_ids.len() - 1
        });
        let s = *sample_index.entry(rec.sample_id.clone()).or_insert_with(|| {
            sample_ids.push(rec.sample_id.clone());
            sample_ids.len() - 1
        });
        if cells.insert((m, s), p).is_some() {
            return Err(Error::parse(
                path,
                line_no,
                format!("duplicate record for model {:?}, sample {:?}", rec.model_id, rec.sample_id),
            ));
        }
    }
    if cells.is_empty() {
        return Err(Error::Empty(format!("{} holds no predictions", path.display())));
    }

    let mut missing = Vec::new();
    let mut probs = Vec::with_capacity(model_ids.len());
    for (m, model) in model_ids.iter().enumerate() {
        let mut row = Vec::with_capacity(sample_ids.len());
        for (s, sample) in sample_ids.iter().enumerate() {
            match cells.remove(&(m, s)) {
                Some(p) => row.push(p),
                None => missing.push((model.clone(), sample.clone())),
            }
        }
        probs.push(row);
    }
    if !missing.is_empty() {
        return Err(Error::Ragged { missing });
    }
    PredictionTensor::new(probs, model_ids, sample_ids, labels.clone())
}

/// Writes one record per (model, sample), models outermost. Floats use the
/// shortest representation that parses back to the identical `f64`.
pub fn save_predictions(t: &PredictionTensor, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    for (m, model) in t.model_ids().iter().enumerate() {
        for (s, sample) in t.sample_ids().iter().enumerate() {
            let rec = PredictionRecord {
                model_id: model.clone(),
                sample_id: sample.clone(),
                probs: t.get(m, s).as_slice().to_vec(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            writeln!(out).map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Synonym lexicon: lowercase token to its synonyms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, Path::new("<bundled lexicon.tsv>")).expect("bundled lexicon is valid")
    }

    pub fn from_entries(entries: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (key, syns) in entries {
            let key = key.to_lowercase();
            let syns = clean_synonyms(&key, syns.iter().map(String::as_str));
            if syns.is_empty() {
                return Err(Error::Validation(format!("no synonyms for {key:?}")));
            }
            clean.insert(key, syns);
        }
        Ok(Self { entries: clean })
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, line_no, "expected token<TAB>synonyms"))?;
            let key = key.trim().to_lowercase();
            if !is_single_word(&key) {
                return Err(Error::parse(path, line_no, format!("{key:?} is not a single word")));
            }
            let raw: Vec<&str> = rest.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if let Some(bad) = raw.iter().find(|s| !is_single_word(s)) {
                return Err(Error::parse(path, line_no, format!("synonym {bad:?} is not a single word")));
            }
            let syns = clean_synonyms(&key, raw.into_iter());
            if syns.is_empty() {
                return Err(Error::parse(path, line_no, format!("empty synonym list for {key:?}")));
            }
            let slot = entries.entry(key).or_default();
            for s in syns {
                if !slot.contains(&s) {
                    slot.push(s);
                }
            }
        }
        Ok(Self { entries })
    }

    /// Synonyms of a word, looked up case-insensitively.
    pub fn synonyms(&self, word: &str) -> Option<&[String]> {
        self.entries.get(lowercase(word).as_ref()).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.synonyms(word).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<String, Vec<String>> {
        &self.entries
    }
}

fn clean_synonyms<'a>(key: &str, syns: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in syns {
        let s = s.to_lowercase();
        if s != key && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn is_single_word(s: &str) -> bool {
    let tokens = tokenize(s);
    tokens.len() == 1 && tokens.tokens()[0].kind == TokenKind::Word
}

/// Reads a lexicon TSV, or returns the bundled lexicon when `path` is `None`.
pub fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        None => Ok(Lexicon::bundled()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Lexicon::parse(&text, path)
        }
    }
}

/// Symmetric key adjacency used for typo simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyboardLayout {
    neighbors: BTreeMap<char, Vec<char>>,
}

impl KeyboardLayout {
    /// Lowercase QWERTY adjacency shipped with the crate.
    pub fn qwerty() -> Self {
        Self::parse(BUNDLED_QWERTY, Path::new("<bundled qwerty.tsv>")).expect("bundled layout is valid")
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut adjacency: BTreeMap<char, BTreeSet<char>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, line_no, "expected char<TAB>neighbours"))?;
            let key = single_char(key)
                .ok_or_else(|| Error::parse(path, line_no, format!("{key:?} is not one character")))?;
            let mut listed = BTreeSet::new();
            for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let c = single_char(item)
                    .ok_or_else(|| Error::parse(path, line_no, format!("{item:?} is not one character")))?;
                if c != key {
                    listed.insert(c);
                }
            }
            if listed.is_empty() {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("{key:?} has no neighbours other than itself"),
                ));
            }
            for &c in &listed {
                adjacency.entry(c).or_default().insert(key);
            }
            adjacency.entry(key).or_default().extend(listed);
        }
        Ok(Self { neighbors: adjacency.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect() })
    }

    /// Neighbours of a character, looked up by its lowercase form.
    pub fn neighbors(&self, c: char) -> Option<&[char]> {
        let mut lower = c.to_lowercase();
        match (lower.next(), lower.next()) {
            (Some(l), None) => self.neighbors.get(&l).map(Vec::as_slice),
            _ => None,
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = char> + '_ {
        self.neighbors.keys().copied()
    }
}

fn single_char(s: &str) -> Option<char> {
    let s = s.trim();
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => c.to_lowercase().next().filter(|_| c.to_lowercase().count() == 1),
        _ => None,
    }
}

/// Reads a layout TSV (symmetry is closed over the listed pairs), or
/// returns the bundled QWERTY layout when `path` is `None`.
pub fn load_keyboard_layout(path: Option<&Path>) -> Result<KeyboardLayout> {
    match path {
        None => Ok(KeyboardLayout::qwerty()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            KeyboardLayout::parse(&text, path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn jsonl_documents() {
        let f = write_tmp(
            "{\"id\":\"r1\",\"title\":\"t\",\"post\":\"p\",\"label\":\"ADHD\"}\n\
             {\"id\":\"r2\",\"title\":\"t2\",\"post\":\"p2\"}\r\n",
            ".jsonl",
        );
        let docs = load_documents(f.path(), DocFormat::Jsonl, &LabelSet::default()).unwrap();
        assert_eq!(docs[0], Document::new("r1", "t", "p", Some("ADHD".into())).unwrap());
        assert_eq!(docs[1].label(), None);
    }

    #[test]
    fn unknown_label_names_the_line() {
        let f = write_tmp(
            "{\"id\":\"r1\",\"title\":\"t\",\"post\":\"p\"}\n\
             {\"id\":\"r2\",\"title\":\"t\",\"post\":\"p\",\"label\":\"adhd \"}\n",
            ".jsonl",
        );
        let err = load_documents(f.path(), DocFormat::Jsonl, &LabelSet::default()).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown label"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_malformed_documents() {
        let dup = write_tmp(
            "{\"id\":\"r1\",\"title\":\"t\",\"post\":\"p\"}\n{\"id\":\"r1\",\"title\":\"t\",\"post\":\"q\"}\n",
            ".jsonl",
        );
        let err = load_documents(dup.path(), DocFormat::Jsonl, &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let bad = write_tmp("{\"id\":\"r1\",\"title\":\"t\",\"post\":\"p\"}\nnot json\n", ".jsonl");
        let err = load_documents(bad.path(), DocFormat::Jsonl, &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn tsv_documents_round_trip() {
        let docs = vec![
            Document::new("a", "Title one", "tab\there\nand newline \\ too", Some("PTSD".into())).unwrap(),
            Document::new("b", "", "only body", None).unwrap(),
        ];
        let f = tempfile::Builder::new().suffix(".tsv").tempfile().unwrap();
        save_documents(&docs, f.path(), DocFormat::Tsv).unwrap();
        let back = load_documents(f.path(), DocFormat::Tsv, &LabelSet::default()).unwrap();
        assert_eq!(back, docs);
    }

    #[test]
    fn tsv_requires_header_and_four_columns() {
        let f = write_tmp("a\tb\tc\td\n", ".tsv");
        assert!(load_documents(f.path(), DocFormat::Tsv, &LabelSet::default()).is_err());
        let f = write_tmp(&format!("{TSV_HEADER}\r\nx\tt\tp\n"), ".tsv");
        let err = load_documents(f.path(), DocFormat::Tsv, &LabelSet::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    fn pred_line(m: &str, s: &str, p: &[f64]) -> String {
        serde_json::to_string(&PredictionRecord {
            model_id: m.into(),
            sample_id: s.into(),
            probs: p.to_vec(),
        })
        .unwrap()
    }

    #[test]
    fn predictions_shape_and_order() {
        let u = [1.0 / 6.0; 6];
        let lines = [
            pred_line("m2", "s1", &u),
            pred_line("m1", "s1", &u),
            pred_line("m2", "s0", &u),
            pred_line("m1", "s0", &u),
        ];
        let f = write_tmp(&lines.join("\n"), ".jsonl");
        let t = load_predictions(f.path(), &LabelSet::default()).unwrap();
        assert_eq!((t.num_models(), t.num_samples(), t.num_classes()), (2, 2, 6));
        assert_eq!(t.model_ids(), ["m2", "m1"]);
        assert_eq!(t.sample_ids(), ["s1", "s0"]);
    }

    #[test]
    fn predictions_rejections() {
        let labels = LabelSet::new(["a", "b"]).unwrap();
        let f = write_tmp(&pred_line("m", "s", &[0.7, 0.5]), ".jsonl");
        assert!(matches!(load_predictions(f.path(), &labels), Err(Error::Parse { line: 1, .. })));

        let dup = [pred_line("m", "s", &[0.5, 0.5]), pred_line("m", "s", &[0.5, 0.5])].join("\n");
        let f = write_tmp(&dup, ".jsonl");
        assert!(matches!(load_predictions(f.path(), &labels), Err(Error::Parse { line: 2, .. })));

        let ragged = [
            pred_line("m1", "s1", &[0.5, 0.5]),
            pred_line("m1", "s2", &[0.5, 0.5]),
            pred_line("m2", "s1", &[0.5, 0.5]),
        ]
        .join("\n");
        let f = write_tmp(&ragged, ".jsonl");
        match load_predictions(f.path(), &labels) {
            Err(Error::Ragged { missing }) => {
                assert_eq!(missing, vec![("m2".to_string(), "s2".to_string())])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn save_to_missing_directory_fails() {
        let labels = LabelSet::new(["a", "b"]).unwrap();
        let t = PredictionTensor::new(
            vec![vec![ProbVector::new(vec![0.25, 0.75]).unwrap()]],
            vec!["m".into()],
            vec!["s".into()],
            labels,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = save_predictions(&t, &dir.path().join("no/such/dir/p.jsonl")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn lexicon_parsing() {
        let f = write_tmp("happy\tglad,joyful\nSad\tsad,unhappy\n", ".tsv");
        let lex = load_lexicon(Some(f.path())).unwrap();
        assert_eq!(lex.synonyms("happy").unwrap(), ["glad", "joyful"]);
        assert_eq!(lex.synonyms("sad").unwrap(), ["unhappy"]);
        assert_eq!(lex.synonyms("SAD").unwrap(), ["unhappy"]);

        let f = write_tmp("ok\tfine\nalone\talone\n", ".tsv");
        assert!(matches!(load_lexicon(Some(f.path())), Err(Error::Parse { line: 2, .. })));
        let f = write_tmp("no tab here\n", ".tsv");
        assert!(matches!(load_lexicon(Some(f.path())), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bundled_lexicon() {
        let lex = load_lexicon(None).unwrap();
        assert!(lex.len() >= 1000, "{} entries", lex.len());
        assert!(lex.contains("happy"));
        for (key, syns) in lex.entries() {
            assert_eq!(key, &key.to_lowercase());
            assert!(!syns.is_empty());
            assert!(!syns.contains(key));
        }
    }

    #[test]
    fn qwerty_layout() {
        let layout = load_keyboard_layout(None).unwrap();
        let s = layout.neighbors('s').unwrap();
        for c in ['a', 'd', 'w', 'e', 'z', 'x'] {
            assert!(s.contains(&c), "{c}");
        }
        for a in layout.keys() {
            for &b in layout.neighbors(a).unwrap() {
                assert_ne!(a, b);
                assert!(layout.neighbors(b).unwrap().contains(&a), "{a} -> {b}");
            }
        }
        assert_eq!(layout.neighbors('S'), layout.neighbors('s'));
    }

    #[test]
    fn layout_closure_and_errors() {
        let f = write_tmp("a\tq,s,z\n", ".tsv");
        let layout = load_keyboard_layout(Some(f.path())).unwrap();
        for c in ['q', 's', 'z'] {
            assert_eq!(layout.neighbors(c).unwrap(), ['a']);
        }
        let f = write_tmp("a\ta\n", ".tsv");
        assert!(matches!(load_keyboard_layout(Some(f.path())), Err(Error::Parse { line: 1, .. })));
    }
}
