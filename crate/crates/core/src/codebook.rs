//! Symbol alphabet and the symbol/perturbation-triplet bijection.
//!
//! Every embeddable symbol owns one triplet `(dR, dG, dB)` with each component
//! drawn from `{-2, -1, 0, +1, +2}`. Triplets are ordered lexicographically,
//! `index = (dR + 2) * 25 + (dG + 2) * 5 + (dB + 2)`, and the 98 alphabet
//! symbols occupy indices `0..=97` in alphabet order. Indices `98..=124` are
//! reserved and never produced by the encoder.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Number of distinct quinary triplets (`5^3`).
pub const TRIPLET_COUNT: usize = 125;

/// Number of symbols in the alphabet.
pub const ALPHABET_SIZE: usize = 98;

const SPECIALS: &str = "`~!@#$%^&*()_+-={}|[]\\:';\"<>?,./";

const SPACE_INDEX: u8 = 94;
const NEWLINE_INDEX: u8 = 95;
const PARA_BREAK_INDEX: u8 = 96;
const TERMINATOR_INDEX: u8 = 97;

/// Character substituted for unmappable input in lossy normalization.
pub const REPLACEMENT_CHAR: char = '?';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodebookError {
    #[error("quinary delta must lie in -2..=2, got {0}")]
    InvalidDelta(i32),
    #[error("triplet {0} is not assigned to any symbol")]
    UnassignedCombination(Triplet),
    #[error("character {codepoint:?} at position {position} has no codebook entry")]
    UnmappableCharacter { position: usize, codepoint: char },
}

/// A single channel offset in `{-2, -1, 0, +1, +2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuinaryDelta(i8);

impl QuinaryDelta {
    pub const ALL: [QuinaryDelta; 5] = [
        QuinaryDelta(-2),
        QuinaryDelta(-1),
        QuinaryDelta(0),
        QuinaryDelta(1),
        QuinaryDelta(2),
    ];

    pub fn new(value: i32) -> Result<Self, CodebookError> {
        if (-2..=2).contains(&value) {
            Ok(QuinaryDelta(value as i8))
        } else {
            Err(CodebookError::InvalidDelta(value))
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    fn digit(self) -> usize {
        (self.0 + 2) as usize
    }
}

impl TryFrom<i32> for QuinaryDelta {
    type Error = CodebookError;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        QuinaryDelta::new(value)
    }
}

/// Per-pixel perturbation `(dR, dG, dB)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet {
    pub dr: QuinaryDelta,
    pub dg: QuinaryDelta,
    pub db: QuinaryDelta,
}

impl Triplet {
    pub fn new(dr: i32, dg: i32, db: i32) -> Result<Self, CodebookError> {
        Ok(Triplet {
            dr: QuinaryDelta::new(dr)?,
            dg: QuinaryDelta::new(dg)?,
            db: QuinaryDelta::new(db)?,
        })
    }

    /// Builds a triplet from its lexicographic index; `None` for `index >= 125`.
    pub fn from_index(index: usize) -> Option<Self> {
        if index >= TRIPLET_COUNT {
            return None;
        }
        let d = |digit: usize| QuinaryDelta(digit as i8 - 2);
        Some(Triplet {
            dr: d(index / 25),
            dg: d(index / 5 % 5),
            db: d(index % 5),
        })
    }

    pub fn index(self) -> usize {
        self.dr.digit() * 25 + self.dg.digit() * 5 + self.db.digit()
    }

    pub fn components(self) -> [i8; 3] {
        [self.dr.0, self.dg.0, self.db.0]
    }

    /// Sum of squared components.
    pub fn energy(self) -> u32 {
        self.components().iter().map(|&c| (c as i32 * c as i32) as u32).sum()
    }

    /// Sum of absolute components.
    pub fn l1(self) -> u32 {
        self.components().iter().map(|&c| c.unsigned_abs() as u32).sum()
    }

    pub fn all() -> impl Iterator<Item = Triplet> {
        (0..TRIPLET_COUNT).filter_map(Triplet::from_index)
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.dr.0, self.dg.0, self.db.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Printable(char),
    Space,
    Newline,
    ParaBreak,
    Terminator,
}

/// One alphabet symbol. Only the 98 alphabet members can be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u8);

impl Symbol {
    pub const SPACE: Symbol = Symbol(SPACE_INDEX);
    pub const NEWLINE: Symbol = Symbol(NEWLINE_INDEX);
    pub const PARA_BREAK: Symbol = Symbol(PARA_BREAK_INDEX);
    pub const TERMINATOR: Symbol = Symbol(TERMINATOR_INDEX);

    /// Position of the symbol in the canonical alphabet order.
    pub fn alphabet_index(self) -> usize {
        self.0 as usize
    }

    pub fn from_alphabet_index(index: usize) -> Option<Symbol> {
        (index < ALPHABET_SIZE).then_some(Symbol(index as u8))
    }

    /// The printable symbol for `c`, if `c` is one of the 94 printable characters.
    pub fn printable(c: char) -> Option<Symbol> {
        let index = match c {
            'A'..='Z' => c as usize - 'A' as usize,
            'a'..='z' => 26 + c as usize - 'a' as usize,
            '0'..='9' => 52 + c as usize - '0' as usize,
            _ => 62 + SPECIALS.chars().position(|s| s == c)?,
        };
        Some(Symbol(index as u8))
    }

    pub fn kind(self) -> SymbolKind {
        match self.0 {
            SPACE_INDEX => SymbolKind::Space,
            NEWLINE_INDEX => SymbolKind::Newline,
            PARA_BREAK_INDEX => SymbolKind::ParaBreak,
            TERMINATOR_INDEX => SymbolKind::Terminator,
            i @ 0..=25 => SymbolKind::Printable((b'A' + i) as char),
            i @ 26..=51 => SymbolKind::Printable((b'a' + i - 26) as char),
            i @ 52..=61 => SymbolKind::Printable((b'0' + i - 52) as char),
            i => SymbolKind::Printable(SPECIALS.as_bytes()[i as usize - 62] as char),
        }
    }

    pub fn is_terminator(self) -> bool {
        self.0 == TERMINATOR_INDEX
    }

    /// Every alphabet symbol in canonical order.
    pub fn alphabet() -> impl Iterator<Item = Symbol> {
        (0..ALPHABET_SIZE as u8).map(Symbol)
    }

    /// Text this symbol expands to; the terminator expands to nothing.
    pub fn as_text(self) -> &'static str {
        const PRINTABLE: &str = concat!(
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
            "`~!@#$%^&*()_+-={}|[]\\:';\"<>?,./"
        );
        match self.0 {
            SPACE_INDEX => " ",
            NEWLINE_INDEX => "\n",
            PARA_BREAK_INDEX => "\n\n",
            TERMINATOR_INDEX => "",
            i => &PRINTABLE[i as usize..i as usize + 1],
        }
    }

    /// Label used in the codebook CSV dump.
    pub fn label(self) -> &'static str {
        match self.kind() {
            SymbolKind::Space => "SP",
            SymbolKind::Newline => "\\n",
            SymbolKind::ParaBreak => "\\n\\n",
            SymbolKind::Terminator => "NUL",
            SymbolKind::Printable(_) => self.as_text(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Bijection between the alphabet and the first 98 triplets.
#[derive(Debug, Clone)]
pub struct Codebook {
    forward: [Triplet; ALPHABET_SIZE],
    reverse: [Option<Symbol>; TRIPLET_COUNT],
}

impl Codebook {
    /// Builds the canonical codebook.
    pub fn new() -> Self {
        let mut forward = [Triplet::from_index(0).unwrap(); ALPHABET_SIZE];
        let mut reverse = [None; TRIPLET_COUNT];
        for symbol in Symbol::alphabet() {
            let triplet = Triplet::from_index(symbol.alphabet_index()).unwrap();
            forward[symbol.alphabet_index()] = triplet;
            assert!(reverse[triplet.index()].is_none(), "duplicate triplet {triplet}");
            reverse[triplet.index()] = Some(symbol);
        }
        Codebook { forward, reverse }
    }

    /// Shared instance of the canonical codebook.
    pub fn standard() -> &'static Codebook {
        static CODEBOOK: OnceLock<Codebook> = OnceLock::new();
        CODEBOOK.get_or_init(Codebook::new)
    }

    pub fn symbol_to_triplet(&self, symbol: Symbol) -> Triplet {
        self.forward[symbol.alphabet_index()]
    }

    pub fn triplet_to_symbol(&self, triplet: Triplet) -> Result<Symbol, CodebookError> {
        self.reverse[triplet.index()].ok_or(CodebookError::UnassignedCombination(triplet))
    }

    /// `(symbol, triplet)` pairs in triplet-index order.
    pub fn entries(&self) -> impl Iterator<Item = (Symbol, Triplet)> + '_ {
        self.reverse
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|s| (s, Triplet::from_index(i).unwrap())))
    }

    /// Writes the codebook as CSV with header `symbol,dr,dg,db,index`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(["symbol", "dr", "dg", "db", "index"])?;
        for (symbol, t) in self.entries() {
            let [dr, dg, db] = t.components();
            writer.write_record([
                symbol.label().to_string(),
                dr.to_string(),
                dg.to_string(),
                db.to_string(),
                t.index().to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl Default for Codebook {
    fn default() -> Self {
        Codebook::new()
    }
}

/// A replacement applied during normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    pub position: usize,
    pub original: char,
    pub replacement: String,
}

/// Record of everything [`normalize_text`] changed. Positions are codepoint
/// offsets into the raw input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationLog {
    pub substitutions: Vec<Substitution>,
    pub rejected: Vec<(usize, char)>,
}

impl NormalizationLog {
    pub fn is_clean(&self) -> bool {
        self.substitutions.is_empty() && self.rejected.is_empty()
    }
}

fn is_direct(c: char) -> bool {
    c == ' ' || c == '\n' || Symbol::printable(c).is_some()
}

fn fold(c: char) -> Option<&'static str> {
    Some(match c {
        '\u{2018}' | '\u{2019}' => "'",
        '\u{201C}' | '\u{201D}' => "\"",
        '\u{2013}' | '\u{2014}' => "-",
        '\u{2026}' => "...",
        '\u{00A0}' | '\t' => " ",
        '\r' => "\n",
        _ => return None,
    })
}

/// Folds typographic characters into the alphabet.
///
/// `\r\n` collapses to a single `\n` (logged once, against the `\r`). In strict
/// mode any other out-of-alphabet codepoint is an error; otherwise it becomes
/// [`REPLACEMENT_CHAR`] and is logged as rejected.
pub fn normalize_text(raw: &str, strict: bool) -> Result<(String, NormalizationLog), CodebookError> {
    let mut out = String::with_capacity(raw.len());
    let mut log = NormalizationLog::default();
    let mut chars = raw.chars().enumerate().peekable();
    while let Some((position, c)) = chars.next() {
        if is_direct(c) {
            out.push(c);
            continue;
        }
        if let Some(replacement) = fold(c) {
            if c == '\r' && matches!(chars.peek(), Some((_, '\n'))) {
                chars.next();
            }
            out.push_str(replacement);
            log.substitutions.push(Substitution {
                position,
                original: c,
                replacement: replacement.to_string(),
            });
        } else if strict {
            return Err(CodebookError::UnmappableCharacter { position, codepoint: c });
        } else {
            out.push(REPLACEMENT_CHAR);
            log.rejected.push((position, c));
        }
    }
    Ok((out, log))
}

/// Splits normalized text into symbols. `"\n\n"` pairs greedily into a
/// paragraph break; a leftover `"\n"` is a plain newline.
pub fn tokenize(normalized: &str) -> Result<Vec<Symbol>, CodebookError> {
    let mut symbols = Vec::with_capacity(normalized.len());
    let mut chars = normalized.chars().enumerate().peekable();
    while let Some((position, c)) = chars.next() {
        let symbol = match c {
            '\n' if matches!(chars.peek(), Some((_, '\n'))) => {
                chars.next();
                Symbol::PARA_BREAK
            }
            '\n' => Symbol::NEWLINE,
            ' ' => Symbol::SPACE,
            _ => Symbol::printable(c)
                .ok_or(CodebookError::UnmappableCharacter { position, codepoint: c })?,
        };
        symbols.push(symbol);
    }
    Ok(symbols)
}

/// Inverse of [`tokenize`]. Terminators contribute no text.
pub fn detokenize(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.as_text()).collect()
}
