//! Text formats: the fair game format and PGSolver parity games.
//!
//! Fair game files start with `fairgame <n> <bot|top|parity>;` followed by one
//! record per node: `<id> <owner> <alpha> <beta> <succs> <fair> ["name"];`.
//! Owner 0 is the existential player, 1 the universal one. Lists are comma
//! separated ids; `-` denotes an empty list. `beta` is 0 unless the mode is
//! `parity`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arena::{BetaMode, FairArena, FairGame, NodeId, Player};
use crate::paritygame::ParityGame;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("node id {0} out of range")]
    IdOutOfRange(usize),
    #[error("node {0}: successor {1} out of range")]
    SuccessorOutOfRange(usize, usize),
    #[error("node {0}: fair edge to {1} is not a successor")]
    FairNotSuccessor(usize, usize),
    #[error("node {0}: beta must be 0 outside parity mode")]
    BetaOutsideParity(usize),
    #[error("node {0}: beta must be positive in parity mode")]
    MissingBeta(usize),
    #[error("node {0}: priority must be positive")]
    ZeroPriority(usize),
    #[error("node {0}: not right-total")]
    NotRightTotal(usize),
    #[error("node {0} missing")]
    MissingNode(usize),
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Quoted(String),
}

/// A `;`-terminated record with the line of its first token.
struct Record {
    line: usize,
    tokens: Vec<Token>,
}

fn records(text: &str) -> Result<Vec<Record>, ParseError> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut start_line = 1;
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            ';' => {
                if cur.is_empty() {
                    return syntax(line, "empty record");
                }
                out.push(Record { line: start_line, tokens: std::mem::take(&mut cur) });
            }
            '"' => {
                if cur.is_empty() {
                    start_line = line;
                }
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\n') | None => return syntax(line, "unterminated string"),
                        Some(c) => s.push(c),
                    }
                }
                cur.push(Token::Quoted(s));
            }
            c => {
                if cur.is_empty() {
                    start_line = line;
                }
                let mut s = String::from(c);
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                cur.push(Token::Word(s));
            }
        }
    }
    if !cur.is_empty() {
        return syntax(start_line, "missing ';'");
    }
    Ok(out)
}

fn word(rec: &Record, i: usize) -> Result<&str, ParseError> {
    match rec.tokens.get(i) {
        Some(Token::Word(w)) => Ok(w),
        Some(Token::Quoted(_)) => syntax(rec.line, format!("field {} must not be quoted", i + 1)),
        None => syntax(rec.line, format!("missing field {}", i + 1)),
    }
}

fn number(rec: &Record, i: usize) -> Result<usize, ParseError> {
    let w = word(rec, i)?;
    w.parse().or_else(|_| syntax(rec.line, format!("expected a number, found '{w}'")))
}

fn priority(rec: &Record, i: usize) -> Result<u32, ParseError> {
    let w = word(rec, i)?;
    w.parse().or_else(|_| syntax(rec.line, format!("expected a priority, found '{w}'")))
}

fn id_list(rec: &Record, i: usize) -> Result<Vec<usize>, ParseError> {
    let w = word(rec, i)?;
    if w == "-" {
        return Ok(Vec::new());
    }
    w.split(',')
        .map(|x| x.parse().or_else(|_| syntax(rec.line, format!("bad id '{x}' in list"))))
        .collect()
}

fn owner(rec: &Record, i: usize) -> Result<Player, ParseError> {
    match word(rec, i)? {
        "0" => Ok(Player::Exists),
        "1" => Ok(Player::Forall),
        w => syntax(rec.line, format!("owner must be 0 or 1, found '{w}'")),
    }
}

fn optional_name(rec: &Record, i: usize) -> Result<Option<String>, ParseError> {
    match rec.tokens.get(i) {
        None => Ok(None),
        Some(Token::Quoted(s)) => Ok(Some(s.clone())),
        Some(Token::Word(w)) => syntax(rec.line, format!("unexpected field '{w}'")),
    }
    .and_then(|n| if rec.tokens.len() > i + 1 { syntax(rec.line, "too many fields") } else { Ok(n) })
}

/// Places records by id, rejecting duplicates, out-of-range and missing ids.
fn by_id(recs: &[Record], n: usize, header_line: usize) -> Result<Vec<&Record>, ParseError> {
    let mut slots: Vec<Option<&Record>> = vec![None; n];
    for rec in recs {
        let id = number(rec, 0)?;
        if id >= n {
            return err(rec.line, ParseErrorKind::IdOutOfRange(id));
        }
        if slots[id].is_some() {
            return err(rec.line, ParseErrorKind::DuplicateId(id));
        }
        slots[id] = Some(rec);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.map_or_else(|| err(header_line, ParseErrorKind::MissingNode(v)), Ok))
        .collect()
}

/// Parses a fair game file.
pub fn parse(text: &str) -> Result<FairGame, ParseError> {
    let recs = records(text)?;
    let Some((head, body)) = recs.split_first() else {
        return syntax(1, "missing header");
    };
    if word(head, 0)? != "fairgame" || head.tokens.len() != 3 {
        return syntax(head.line, "header must be 'fairgame <n> <bot|top|parity>'");
    }
    let n = number(head, 1)?;
    let mode = match word(head, 2)? {
        "bot" => BetaMode::Bot,
        "top" => BetaMode::Top,
        "parity" => BetaMode::Parity,
        m => return syntax(head.line, format!("unknown mode '{m}'")),
    };
    if body.len() > n {
        return syntax(head.line, format!("{} records for {n} nodes", body.len()));
    }
    let ordered = by_id(body, n, head.line)?;
    let (mut owners, mut succs, mut fairs) = (Vec::new(), Vec::new(), Vec::new());
    let (mut alpha, mut beta, mut names) = (Vec::new(), Vec::new(), Vec::new());
    for (v, rec) in ordered.into_iter().enumerate() {
        owners.push(owner(rec, 1)?);
        let a = priority(rec, 2)?;
        if a == 0 {
            return err(rec.line, ParseErrorKind::ZeroPriority(v));
        }
        let b = priority(rec, 3)?;
        match mode {
            BetaMode::Parity if b == 0 => return err(rec.line, ParseErrorKind::MissingBeta(v)),
            BetaMode::Bot | BetaMode::Top if b != 0 => {
                return err(rec.line, ParseErrorKind::BetaOutsideParity(v))
            }
            _ => {}
        }
        let succ = id_list(rec, 4)?;
        if let Some(&w) = succ.iter().find(|&&w| w >= n) {
            return err(rec.line, ParseErrorKind::SuccessorOutOfRange(v, w));
        }
        if succ.is_empty() {
            return err(rec.line, ParseErrorKind::NotRightTotal(v));
        }
        let fair = id_list(rec, 5)?;
        if let Some(&w) = fair.iter().find(|w| !succ.contains(w)) {
            return err(rec.line, ParseErrorKind::FairNotSuccessor(v, w));
        }
        names.push(optional_name(rec, 6)?);
        alpha.push(a);
        beta.push(b);
        succs.push(succ);
        fairs.push(fair);
    }
    let mut game = FairGame::new(FairArena::new(owners, succs, fairs), alpha, mode, beta);
    game.names = names;
    Ok(game)
}

fn join(ids: &[NodeId]) -> String {
    if ids.is_empty() {
        return "-".into();
    }
    ids.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes a fair game in normalized form (one record per line, sorted lists).
pub fn emit(game: &FairGame) -> String {
    let mut out = format!("fairgame {} {};\n", game.len(), game.beta_mode);
    for v in game.arena.nodes() {
        let owner = game.arena.owner(v).index();
        let _ = write!(
            out,
            "{v} {owner} {} {} {} {}",
            game.alpha[v],
            game.beta[v],
            join(game.arena.succ(v)),
            join(game.arena.fair_succ(v))
        );
        if let Some(name) = &game.names[v] {
            let _ = write!(out, " \"{name}\"");
        }
        out.push_str(";\n");
    }
    out
}

/// Writes a node-priority game in PGSolver format.
pub fn emit_pgsolver(game: &ParityGame, labels: &[String]) -> String {
    assert!(game.edge_priority.is_none(), "PGSolver format has no edge priorities");
    let mut out = format!("parity {};\n", game.len().saturating_sub(1));
    for v in 0..game.len() {
        let _ = write!(out, "{v} {} {} {}", game.priority[v], game.owner[v].index(), join(&game.succ[v]));
        if let Some(l) = labels.get(v) {
            let _ = write!(out, " \"{l}\"");
        }
        out.push_str(";\n");
    }
    out
}

/// Parses a PGSolver game with ids `0..=maxid`; returns the game and labels.
pub fn parse_pgsolver(text: &str) -> Result<(ParityGame, Vec<Option<String>>), ParseError> {
    let recs = records(text)?;
    let Some((head, mut body)) = recs.split_first() else {
        return syntax(1, "missing header");
    };
    if word(head, 0)? != "parity" || head.tokens.len() != 2 {
        return syntax(head.line, "header must be 'parity <maxid>'");
    }
    let n = number(head, 1)?.checked_add(1).map_or_else(|| syntax(head.line, "maxid too large"), Ok)?;
    if let Some(first) = body.first() {
        if matches!(first.tokens.first(), Some(Token::Word(w)) if w == "start") {
            body = &body[1..];
        }
    }
    if body.len() > n {
        return syntax(head.line, format!("{} records for maxid {}", body.len(), n - 1));
    }
    let ordered = by_id(body, n, head.line)?;
    let mut game = ParityGame { owner: vec![], succ: vec![], priority: vec![], edge_priority: None };
    let mut labels = Vec::new();
    for (v, rec) in ordered.into_iter().enumerate() {
        game.priority.push(priority(rec, 1)?);
        game.owner.push(owner(rec, 2)?);
        let succ = id_list(rec, 3)?;
        if let Some(&w) = succ.iter().find(|&&w| w >= n) {
            return err(rec.line, ParseErrorKind::SuccessorOutOfRange(v, w));
        }
        if succ.is_empty() {
            return err(rec.line, ParseErrorKind::NotRightTotal(v));
        }
        game.succ.push(succ);
        labels.push(optional_name(rec, 4)?);
    }
    Ok((game, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    const G1: &str = "fairgame 2 bot; 0 1 3 0 0,1 1 \"n3\"; 1 0 4 0 0 - \"n4\";";

    #[test]
    fn parses_g1() {
        let g = parse(G1).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.arena.is_fair_edge(0, 1));
        assert_eq!(g.arena.owner(0), Player::Forall);
        assert_eq!(g.names[1].as_deref(), Some("n4"));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn emit_is_normalized() {
        let g = parse(G1).unwrap();
        let text = emit(&g);
        assert_eq!(text, "fairgame 2 bot;\n0 1 3 0 0,1 1 \"n3\";\n1 0 4 0 0 - \"n4\";\n");
        assert_eq!(parse(&text).unwrap(), g);
    }

    fn kind(text: &str) -> ParseErrorKind {
        parse(text).unwrap_err().kind
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(kind("fairgame 2 bot; 0 0 1 0 0 -; 0 0 1 0 0 -;"), ParseErrorKind::DuplicateId(0));
        assert_eq!(kind("fairgame 1 bot; 0 0 1 0 3 -;"), ParseErrorKind::SuccessorOutOfRange(0, 3));
        assert_eq!(
            kind("fairgame 2 bot; 0 0 1 0 0 1; 1 0 1 0 1 -;"),
            ParseErrorKind::FairNotSuccessor(0, 1)
        );
        assert_eq!(kind("fairgame 1 top; 0 0 1 2 0 -;"), ParseErrorKind::BetaOutsideParity(0));
        assert_eq!(kind("fairgame 1 bot; 0 0 1 0 - -;"), ParseErrorKind::NotRightTotal(0));
        assert_eq!(kind("fairgame 2 bot; 0 0 1 0 0 -;"), ParseErrorKind::MissingNode(1));
        assert_eq!(kind("fairgame 1 bot; 0 0 0 0 0 -;"), ParseErrorKind::ZeroPriority(0));
    }

    #[test]
    fn error_names_the_line() {
        let e = parse("fairgame 2 bot;\n0 0 1 0 0 -;\n1 0 1 0 5 -;\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.to_string().starts_with("line 3"));
    }

    #[test]
    fn pgsolver_round_trip() {
        let g = ParityGame {
            owner: vec![Player::Exists, Player::Forall],
            succ: vec![vec![0, 1], vec![0]],
            priority: vec![2, 1],
            edge_priority: None,
        };
        let text = emit_pgsolver(&g, &["a".into(), "b".into()]);
        assert_eq!(text, "parity 1;\n0 2 0 0,1 \"a\";\n1 1 1 0 \"b\";\n");
        let (h, labels) = parse_pgsolver(&text).unwrap();
        assert_eq!(h, g);
        assert_eq!(labels, vec![Some("a".into()), Some("b".into())]);
        assert!(parse_pgsolver("parity 0; start 0; 0 1 0 0;").is_ok());
    }
}
