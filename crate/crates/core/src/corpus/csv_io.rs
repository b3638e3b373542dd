use std::collections::HashSet;
use std::io::{Read, Write};

use serde::Serialize;

use super::{
    in_unit, ColumnSchema, Comment, Corpus, CorpusError, IdentityRegistry, Reaction, Subtype,
};

/// A row dropped during ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rejected: Vec<RejectedRow>,
}

impl IngestStats {
    pub fn rejected_count(&self) -> usize {
        self.rejected.len()
    }
}

struct Layout {
    id: usize,
    text: usize,
    target: usize,
    subtypes: Vec<(Subtype, usize)>,
    identities: Vec<(String, usize)>,
    reactions: Vec<(Reaction, usize)>,
}

impl Layout {
    fn resolve(headers: &csv::StringRecord, schema: &ColumnSchema) -> Result<Self, CorpusError> {
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let require =
            |name: &str| find(name).ok_or_else(|| CorpusError::MissingColumn(name.to_string()));
        Ok(Self {
            id: require(&schema.id)?,
            text: require(&schema.text)?,
            target: require(&schema.target)?,
            subtypes: schema
                .subtypes
                .iter()
                .filter_map(|(s, col)| find(col).map(|i| (*s, i)))
                .collect(),
            identities: schema
                .identities
                .iter()
                .filter_map(|(n, col)| find(col).map(|i| (n.clone(), i)))
                .collect(),
            reactions: schema
                .reactions
                .iter()
                .filter_map(|(r, col)| find(col).map(|i| (*r, i)))
                .collect(),
        })
    }
}

fn parse_score(cell: &str, what: &str) -> Result<Option<f64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let v: f64 = cell
        .parse()
        .map_err(|_| format!("unparsable {what} `{cell}`"))?;
    if !in_unit(v) {
        return Err(format!("{what} {v} outside [0, 1]"));
    }
    Ok(Some(v))
}

fn parse_count(cell: &str, what: &str) -> Result<Option<u64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    if let Ok(v) = cell.parse::<u64>() {
        return Ok(Some(v));
    }
    // some exports write counts as floats
    match cell.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(Some(v as u64)),
        _ => Err(format!("invalid {what} count `{cell}`")),
    }
}

fn parse_row(record: &csv::StringRecord, layout: &Layout) -> Result<Comment, String> {
    let cell = |i: usize| record.get(i).unwrap_or("");
    let id = cell(layout.id).trim();
    if id.is_empty() {
        return Err("empty id".into());
    }
    let target = parse_score(cell(layout.target), "target")?.ok_or("missing target")?;
    let mut comment = Comment::new(id, cell(layout.text), target);
    for (s, i) in &layout.subtypes {
        if let Some(v) = parse_score(cell(*i), s.name())? {
            comment.subtype_scores.insert(*s, v);
        }
    }
    for (name, i) in &layout.identities {
        if let Some(v) = parse_score(cell(*i), name)? {
            comment.identity_scores.insert(name.clone(), v);
        }
    }
    for (r, i) in &layout.reactions {
        if let Some(v) = parse_count(cell(*i), r.name())? {
            comment.reactions.insert(*r, v);
        }
    }
    Ok(comment)
}

/// Reads a headered UTF-8 CSV into a [`Corpus`].
///
/// Malformed CSV (ragged rows, invalid UTF-8) aborts with the offending line.
/// Rows with bad values or duplicate ids are skipped and listed in [`IngestStats`].
pub fn parse_csv<R: Read>(
    source: R,
    schema: &ColumnSchema,
) -> Result<(Corpus, IngestStats), CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let layout = Layout::resolve(&headers, schema)?;
    let registry = IdentityRegistry::from_names(layout.identities.iter().map(|(n, _)| n.as_str()))
        .map_err(|name| CorpusError::UnknownIdentity {
            name,
            known: "see JIGSAW_IDENTITIES".into(),
        })?;

    let mut stats = IngestStats::default();
    let mut comments = Vec::new();
    let mut seen = HashSet::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(e)),
        }
        stats.rows_read += 1;
        let line = record.position().map_or(0, |p| p.line());
        match parse_row(&record, &layout) {
            Ok(c) if !seen.insert(c.id.clone()) => stats.rejected.push(RejectedRow {
                line,
                reason: format!("duplicate id `{}`", c.id),
            }),
            Ok(c) => comments.push(c),
            Err(reason) => stats.rejected.push(RejectedRow { line, reason }),
        }
    }
    stats.rows_accepted = comments.len();
    Ok((Corpus { comments, registry }, stats))
}

fn csv_error(e: csv::Error) -> CorpusError {
    let line = e.position().map_or(0, |p| p.line());
    CorpusError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Writes a corpus using Jigsaw column names.
///
/// Subtype and reaction columns are written only if some comment carries them;
/// every registry identity gets a column. Absent cells are left empty.
pub fn write_csv<W: Write>(corpus: &Corpus, sink: W) -> Result<(), CorpusError> {
    let subtypes: Vec<Subtype> = Subtype::ALL
        .into_iter()
        .filter(|s| corpus.iter().any(|c| c.subtype_scores.contains_key(s)))
        .collect();
    let reactions: Vec<Reaction> = Reaction::ALL
        .into_iter()
        .filter(|r| corpus.iter().any(|c| c.reactions.contains_key(r)))
        .collect();
    let identities: Vec<&str> = corpus.registry().names().collect();

    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = vec!["id", "comment_text", "target"];
    header.extend(subtypes.iter().map(|s| s.jigsaw_column()));
    header.extend(identities.iter().copied());
    header.extend(reactions.iter().map(|r| r.name()));
    w.write_record(&header).map_err(write_error)?;

    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for c in corpus {
        let mut row: Vec<String> = vec![c.id.clone(), c.text.clone(), c.target.to_string()];
        row.extend(
            subtypes
                .iter()
                .map(|s| opt(c.subtype_scores.get(s).copied())),
        );
        row.extend(identities.iter().map(|n| opt(c.identity_score(n))));
        row.extend(reactions.iter().map(|r| {
            c.reactions
                .get(r)
                .map(|v| v.to_string())
                .unwrap_or_default()
        }));
        w.write_record(&row).map_err(write_error)?;
    }
    w.flush().map_err(|e| CorpusError::Write(e.to_string()))
}

fn write_error(e: csv::Error) -> CorpusError {
    CorpusError::Write(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::JIGSAW_IDENTITIES;
    use std::collections::BTreeMap;

    fn identity_map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| ((*k).to_string(), *v)).collect()
    }

    fn parse(s: &str) -> Result<(Corpus, IngestStats), CorpusError> {
        parse_csv(s.as_bytes(), &ColumnSchema::default())
    }

    #[test]
    fn minimal_input() {
        let (c, stats) = parse("id,comment_text,target\n7,hello,0.0\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.comments()[0].target, 0.0);
        assert_eq!(c.comments()[0].id, "7");
        assert!(c.registry().is_empty());
        assert_eq!(stats.rows_accepted, 1);
    }

    #[test]
    fn out_of_range_target_is_rejected_with_line() {
        let (c, stats) =
            parse("id,comment_text,target\n1,ok,0.1\n2,bad,1.2\n3,\"x\",abc\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(stats.rejected_count(), 2);
        assert_eq!(stats.rejected[0].line, 3);
        assert!(stats.rejected[0].reason.contains("1.2"));
        assert_eq!(stats.rejected[1].line, 4);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let (c, stats) = parse("id,comment_text,target\n1,a,0.1\n1,b,0.2\n").unwrap();
        assert_eq!(c.len(), 1);
        assert!(stats.rejected[0].reason.contains("duplicate"));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let err = parse("id,text,target\n1,a,0.1\n").unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn(ref c) if c == "comment_text"));
    }

    #[test]
    fn ragged_row_is_parse_error_with_line() {
        let err = parse("id,comment_text,target\n1,a,0.1\n2,b\n").unwrap_err();
        match err {
            CorpusError::Csv { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_jigsaw_header() {
        let header = "id,target,comment_text,severe_toxicity,obscene,identity_attack,insult,threat,asian,atheist,bisexual,black,buddhist,christian,female,heterosexual,hindu,homosexual_gay_or_lesbian,intellectual_or_learning_disability,jewish,latino,male,muslim,other_disability,other_gender,other_race_or_ethnicity,other_religion,other_sexual_orientation,physical_disability,psychiatric_or_mental_illness,transgender,white,created_date,publication_id,parent_id,article_id,rating,funny,wow,sad,likes,disagree,sexual_explicit,identity_annotator_count,toxicity_annotator_count";
        assert_eq!(header.split(',').count(), 45);
        let mut row = vec![""; 45];
        row[0] = "239583";
        row[1] = "0.83";
        row[2] = "The woman is basically a slave.";
        row[5] = "0.83"; // identity_attack
        row[6] = "0.83"; // insult
        row[14] = "1.0"; // female
        row[40] = "2"; // likes
        let input = format!("{header}\n{}\n", row.join(","));
        let (c, stats) = parse(&input).unwrap();
        assert_eq!(stats.rejected_count(), 0);
        assert_eq!(c.registry().len(), 24);
        let names: Vec<&str> = c.registry().names().collect();
        let expected: Vec<&str> = JIGSAW_IDENTITIES.iter().map(|(n, _)| *n).collect();
        assert_eq!(names, expected);
        let comment = &c.comments()[0];
        assert_eq!(comment.identity_score("female"), Some(1.0));
        // empty identity cells are absent, not zero
        assert_eq!(comment.identity_score("male"), None);
        assert_eq!(comment.subtype_scores.get(&Subtype::Insult), Some(&0.83));
        assert_eq!(comment.reactions.get(&Reaction::Likes), Some(&2));
    }

    #[test]
    fn renamed_columns() {
        let mut schema = ColumnSchema::default();
        assert!(schema.set_column("comment_text", "text"));
        assert!(schema.set_column("target", "toxicity"));
        assert!(!schema.set_column("nonsense", "x"));
        let (c, _) = parse_csv("id,text,toxicity\na,hi,0.7\n".as_bytes(), &schema).unwrap();
        assert_eq!(c.comments()[0].target, 0.7);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let mut a = Comment::new("a", "hello, \"world\"\nsecond line", 0.123456789);
        a.identity_scores = identity_map(&[("female", 1.0), ("muslim", 0.1)]);
        a.subtype_scores.insert(Subtype::Insult, 0.3);
        a.reactions.insert(Reaction::Sad, 4);
        let b = Comment::new("b", "", 1.0);
        let corpus = Corpus::new(
            vec![a, b],
            IdentityRegistry::from_names(["female", "muslim", "black"]).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&corpus, &mut buf).unwrap();
        let (back, stats) = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(stats.rejected_count(), 0);
        assert_eq!(back, corpus);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        type Row = (String, f64, Option<f64>, Option<f64>, Option<u64>);

        fn build(rows: Vec<Row>) -> Corpus {
            let comments = rows
                .into_iter()
                .enumerate()
                .map(|(i, (text, target, female, insult, likes))| {
                    let mut c = Comment::new(format!("id{i}"), text, target);
                    if let Some(f) = female {
                        c.identity_scores.insert("female".into(), f);
                    }
                    if let Some(s) = insult {
                        c.subtype_scores.insert(Subtype::Insult, s);
                    }
                    if let Some(l) = likes {
                        c.reactions.insert(Reaction::Likes, l);
                    }
                    c
                })
                .collect();
            Corpus::new(comments, IdentityRegistry::from_names(["female"]).unwrap()).unwrap()
        }

        proptest! {
            #[test]
            fn csv_round_trip(rows in proptest::collection::vec(
                (
                    "[ -~]{0,30}",
                    0.0f64..=1.0,
                    proptest::option::of(0.0f64..=1.0),
                    proptest::option::of(0.0f64..=1.0),
                    proptest::option::of(0u64..1000),
                ),
                1..12,
            )) {
                let corpus = build(rows);
                let mut buf = Vec::new();
                write_csv(&corpus, &mut buf).unwrap();
                let (back, stats) = parse_csv(buf.as_slice(), &ColumnSchema::default()).unwrap();
                prop_assert_eq!(stats.rejected_count(), 0);
                prop_assert_eq!(back, corpus);
            }
        }
    }
}
