//! CoNLL-U ingestion for year-stamped dependency corpora.
//!
//! Each sentence block must carry a `# year = <YYYY>` comment; `# sent_id`
//! is optional and defaults to the 1-based block ordinal. Multiword-token
//! ranges (`1-2`) and empty nodes (`1.1`) are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dependency label of the sentence root.
pub const ROOT_LABEL: &str = "ROOT";

/// Returns true when `label` is the root relation (`ROOT` or UD's `root`).
pub fn is_root_label(label: &str) -> bool {
    label.eq_ignore_ascii_case(ROOT_LABEL)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// 0 for the root, otherwise the 1-based index of the governor.
    pub head: usize,
    pub deprel: String,
    /// XPOS, FEATS, DEPS, MISC, carried through untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passthrough: Option<[String; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepSentence {
    pub sent_id: String,
    pub year: i32,
    pub tokens: Vec<Token>,
}

impl DepSentence {
    /// Checks the tree invariants: contiguous indices from 1, a single root,
    /// heads in range, no self-loops and no cycles.
    pub fn validate(&self) -> Result<(), TreeDefect> {
        if self.tokens.is_empty() {
            return Err(TreeDefect::Empty);
        }
        let n = self.tokens.len();
        let mut roots = 0;
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(TreeDefect::BadIndex { index: tok.index, expected: pos + 1 });
            }
            if tok.head == tok.index {
                return Err(TreeDefect::SelfLoop { index: tok.index });
            }
            if tok.head > n {
                return Err(TreeDefect::DanglingHead { index: tok.index, head: tok.head });
            }
            if (tok.head == 0) != is_root_label(&tok.deprel) {
                return Err(TreeDefect::RootLabelMismatch { index: tok.index });
            }
            if tok.head == 0 {
                roots += 1;
            }
        }
        if roots != 1 {
            return Err(TreeDefect::RootCount(roots));
        }
        // With exactly one root and in-range heads, every token must reach
        // the root within n steps unless it sits on a cycle.
        for tok in &self.tokens {
            let mut cur = tok.index;
            let mut steps = 0;
            while cur != 0 {
                cur = self.tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(TreeDefect::Cycle { index: tok.index });
                }
            }
        }
        Ok(())
    }

    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeDefect {
    #[error("sentence has no tokens")]
    Empty,
    #[error("token index {index} out of sequence (expected {expected})")]
    BadIndex { index: usize, expected: usize },
    #[error("token {index} is its own head")]
    SelfLoop { index: usize },
    #[error("token {index} points at missing head {head}")]
    DanglingHead { index: usize, head: usize },
    #[error("token {index}: head 0 and root label must coincide")]
    RootLabelMismatch { index: usize },
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("cycle through token {index}")]
    Cycle { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub sentences: Vec<DepSentence>,
    /// `None` for an empty corpus.
    pub year_range: Option<(i32, i32)>,
}

impl Corpus {
    pub fn new(sentences: Vec<DepSentence>) -> Self {
        let year_range = sentences.iter().fold(None, |acc, s| match acc {
            None => Some((s.year, s.year)),
            Some((lo, hi)) => Some((i32::min(lo, s.year), i32::max(hi, s.year))),
        });
        Self { sentences, year_range }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Every dependency label attested in the corpus.
    pub fn label_inventory(&self) -> BTreeSet<&str> {
        self.sentences.iter().flat_map(|s| s.tokens.iter().map(|t| t.deprel.as_str())).collect()
    }

    /// Serializes back to CoNLL-U. Parsing the output yields an equal corpus.
    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            let _ = writeln!(out, "# sent_id = {}", s.sent_id);
            let _ = writeln!(out, "# year = {}", s.year);
            for t in &s.tokens {
                let [xpos, feats, deps, misc] = match &t.passthrough {
                    Some(p) => p.clone(),
                    None => ["_".into(), "_".into(), "_".into(), "_".into()],
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    t.index, t.surface, t.lemma, t.upos, xpos, feats, t.head, t.deprel, deps, misc
                );
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// Skip bad sentences and report them.
    #[default]
    Lenient,
    /// Fail on the first bad sentence.
    Strict,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("sentence {sent_id}: missing `# year = <YYYY>` comment")]
    MissingYear { sent_id: String },
    #[error("sentence {sent_id}: malformed tree: {defect}")]
    MalformedTree { sent_id: String, defect: TreeDefect },
    #[error("sentence {sent_id}, line {line}: {message}")]
    Syntax { sent_id: String, line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ParseError {
    pub fn sent_id(&self) -> Option<&str> {
        match self {
            ParseError::MissingYear { sent_id }
            | ParseError::MalformedTree { sent_id, .. }
            | ParseError::Syntax { sent_id, .. } => Some(sent_id),
            ParseError::Io(_) => None,
        }
    }
}

/// Outcome of a lenient parse: the good sentences plus what was dropped.
#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub skipped: Vec<ParseError>,
}

struct Block {
    first_line: usize,
    sent_id: Option<String>,
    year: Option<String>,
    rows: Vec<(usize, String)>,
}

/// Parses CoNLL-U text. In strict mode the first defective sentence is
/// returned as the error; otherwise defective sentences land in `skipped`.
pub fn parse_conllu<R: BufRead>(reader: R, strictness: Strictness) -> Result<ParseOutcome, ParseError> {
    let mut outcome = ParseOutcome::default();
    let mut sentences = Vec::new();
    let mut block: Option<Block> = None;
    let mut ordinal = 0usize;

    let flush = |block: Block, ordinal: usize, sentences: &mut Vec<DepSentence>, skipped: &mut Vec<ParseError>| {
        match build_sentence(block, ordinal) {
            Ok(s) => {
                sentences.push(s);
                Ok(())
            }
            Err(e) if strictness == Strictness::Strict => Err(e),
            Err(e) => {
                skipped.push(e);
                Ok(())
            }
        }
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            if let Some(b) = block.take() {
                ordinal += 1;
                flush(b, ordinal, &mut sentences, &mut outcome.skipped)?;
            }
            continue;
        }
        let b = block.get_or_insert_with(|| Block { first_line: lineno, sent_id: None, year: None, rows: Vec::new() });
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sent_id" => b.sent_id = Some(value.trim().to_string()),
                    "year" => b.year = Some(value.trim().to_string()),
                    _ => {}
                }
            }
        } else {
            b.rows.push((lineno, trimmed.to_string()));
        }
    }
    if let Some(b) = block.take() {
        ordinal += 1;
        flush(b, ordinal, &mut sentences, &mut outcome.skipped)?;
    }

    outcome.corpus = Corpus::new(sentences);
    Ok(outcome)
}

/// Convenience wrapper over [`parse_conllu`] for in-memory text.
pub fn parse_conllu_str(text: &str, strictness: Strictness) -> Result<ParseOutcome, ParseError> {
    parse_conllu(text.as_bytes(), strictness)
}

fn build_sentence(block: Block, ordinal: usize) -> Result<DepSentence, ParseError> {
    let sent_id = block.sent_id.unwrap_or_else(|| ordinal.to_string());
    let syntax = |line: usize, message: String| ParseError::Syntax { sent_id: sent_id.clone(), line, message };

    let year = match block.year {
        None => return Err(ParseError::MissingYear { sent_id }),
        Some(y) => y.parse::<i32>().map_err(|_| syntax(block.first_line, format!("unparsable year {y:?}")))?,
    };

    let mut tokens = Vec::with_capacity(block.rows.len());
    for (lineno, row) in &block.rows {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() != 10 {
            return Err(syntax(*lineno, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index = cols[0].parse::<usize>().map_err(|_| syntax(*lineno, format!("bad ID {:?}", cols[0])))?;
        let head = cols[6].parse::<usize>().map_err(|_| syntax(*lineno, format!("bad HEAD {:?}", cols[6])))?;
        let passthrough = [cols[4], cols[5], cols[8], cols[9]];
        let passthrough =
            if passthrough.iter().all(|c| *c == "_") { None } else { Some(passthrough.map(str::to_string)) };
        tokens.push(Token {
            index,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
            passthrough,
        });
    }

    let sentence = DepSentence { sent_id, year, tokens };
    if let Err(defect) = sentence.validate() {
        return Err(ParseError::MalformedTree { sent_id: sentence.sent_id, defect });
    }
    Ok(sentence)
}

/// One occurrence of the target lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub lemma: String,
    pub sentence_ref: String,
    pub year: i32,
    pub core_index: usize,
    /// Label of the arc into the vehicle; `ROOT` when it heads the sentence.
    pub incoming_label: String,
    /// Labels of the vehicle's direct dependents in linear order.
    pub dependent_labels: Vec<String>,
    /// Token indices matching `dependent_labels`.
    pub dependent_indices: Vec<usize>,
}

impl Instance {
    /// Number of dependents that precede the vehicle in the sentence.
    pub fn core_slot(&self) -> usize {
        self.dependent_indices.partition_point(|&i| i < self.core_index)
    }
}

/// Collects every token whose lemma equals `lemma`, ordered by
/// `(year, sent_id, core_index)`.
pub fn extract_instances(corpus: &Corpus, lemma: &str) -> Vec<Instance> {
    let mut out = Vec::new();
    for sentence in &corpus.sentences {
        for tok in sentence.tokens.iter().filter(|t| t.lemma == lemma) {
            let incoming_label = if tok.head == 0 { ROOT_LABEL.to_string() } else { tok.deprel.clone() };
            let (dependent_indices, dependent_labels) =
                sentence.tokens.iter().filter(|d| d.head == tok.index).map(|d| (d.index, d.deprel.clone())).unzip();
            out.push(Instance {
                lemma: lemma.to_string(),
                sentence_ref: sentence.sent_id.clone(),
                year: sentence.year,
                core_index: tok.index,
                incoming_label,
                dependent_labels,
                dependent_indices,
            });
        }
    }
    out.sort_by(|a, b| (a.year, &a.sentence_ref, a.core_index).cmp(&(b.year, &b.sentence_ref, b.core_index)));
    out
}

/// Debug dump: one JSON object per line.
pub fn write_instances_jsonl<W: Write>(mut w: W, instances: &[Instance]) -> io::Result<()> {
    for inst in instances {
        serde_json::to_writer(&mut w, inst)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
