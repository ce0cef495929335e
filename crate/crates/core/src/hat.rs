//! Derivation of the ontology's core relations from the six-pole activity
//! model.
//!
//! The pipeline is a chain of pure functions:
//!
//! 1. [`default_triads`]: the triads (3-pole sub-triangles) under analysis.
//! 2. [`implication_table`]: per use case, how many involved triads contain
//!    each pole.
//! 3. [`candidate_relations`]: each triad yields a directed, named 3-cycle.
//! 4. [`dedupe_pairs`]: candidates collapse to unordered pole pairs.
//! 5. [`apply_decisions`]: a keep/drop [`DecisionTable`] picks the final
//!    name and direction for each pair.
//! 6. [`full_relation_set`]: the three locality relations are appended
//!    (locality is not a pole of the model).
//! 7. [`map_to_concepts`]: poles are replaced by ontology classes.
//!
//! [`derive_schema`] runs everything with the shipped defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rdf::Iri;
use crate::schema::{self, PropertyDef, SchemaDef, SchemaError};
use crate::vocab::ontosoc;

/// Triad count stated alongside the implication table; the table itself
/// implies [`default_triads`]'s ten.
pub const REPORTED_TRIAD_COUNT: usize = 12;

const DEFAULT_DECISIONS: &str = include_str!("../data/decisions.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HatError {
    #[error("unknown pole {0:?}")]
    UnknownPole(String),
    #[error("a triad needs three distinct poles, got {0:?}")]
    InvalidTriad(Vec<Pole>),
    #[error("a pole pair needs two distinct poles, got {0} twice")]
    InvalidPair(Pole),
    #[error("use case {case} involves triad {triad} which is not in the configured set")]
    UnknownTriad { case: String, triad: Triad },
    #[error("duplicate use case id {0:?}")]
    DuplicateCase(String),
    #[error("naming does not cover triad {0}")]
    MissingNaming(Triad),
    #[error("naming for triad {0} is not a directed 3-cycle over its poles")]
    NotACycle(Triad),
    #[error("decision table does not cover pair {0}")]
    UncoveredPair(PolePair),
    #[error("decision for {pair} keeps direction {from} -> {to}, which is not that pair")]
    DirectionMismatch { pair: PolePair, from: Pole, to: Pole },
    #[error("no concept mapped for {0}")]
    UnmappedNode(Node),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("derived schema is invalid: {0}")]
    Schema(#[from] SchemaError),
}

/// The six poles of the activity model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pole {
    Subject,
    Object,
    Tools,
    Rules,
    Community,
    DivisionOfLabour,
}

impl Pole {
    pub const ALL: [Pole; 6] = [
        Pole::Subject,
        Pole::Object,
        Pole::Tools,
        Pole::Rules,
        Pole::Community,
        Pole::DivisionOfLabour,
    ];

    /// Column order of the implication table.
    pub const TABLE_ORDER: [Pole; 6] = [
        Pole::Community,
        Pole::Object,
        Pole::Subject,
        Pole::Rules,
        Pole::DivisionOfLabour,
        Pole::Tools,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pole::Subject => "Subject",
            Pole::Object => "Object",
            Pole::Tools => "Tools",
            Pole::Rules => "Rules",
            Pole::Community => "Community",
            Pole::DivisionOfLabour => "DivisionOfLabour",
        }
    }
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pole {
    type Err = HatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        Ok(match key.as_str() {
            "subject" => Pole::Subject,
            "object" => Pole::Object,
            "tool" | "tools" => Pole::Tools,
            "rule" | "rules" => Pole::Rules,
            "community" => Pole::Community,
            "divisionoflabour" | "divisionoflabor" => Pole::DivisionOfLabour,
            _ => return Err(HatError::UnknownPole(s.trim().to_string())),
        })
    }
}

/// Three distinct poles, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triad([Pole; 3]);

impl Triad {
    pub fn new(a: Pole, b: Pole, c: Pole) -> Result<Self, HatError> {
        let mut poles = [a, b, c];
        poles.sort();
        if poles[0] == poles[1] || poles[1] == poles[2] {
            return Err(HatError::InvalidTriad(vec![a, b, c]));
        }
        Ok(Triad(poles))
    }

    pub fn poles(&self) -> [Pole; 3] {
        self.0
    }

    pub fn contains(&self, pole: Pole) -> bool {
        self.0.contains(&pole)
    }

    pub fn pairs(&self) -> [PolePair; 3] {
        let [a, b, c] = self.0;
        [PolePair(a, b), PolePair(a, c), PolePair(b, c)]
    }
}

impl fmt::Display for Triad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{{{a}, {b}, {c}}}")
    }
}

impl FromStr for Triad {
    type Err = HatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let poles: Vec<Pole> = s.split([',', '-']).map(str::parse).collect::<Result<_, _>>()?;
        match poles.as_slice() {
            [a, b, c] => Triad::new(*a, *b, *c),
            _ => Err(HatError::InvalidTriad(poles)),
        }
    }
}

/// Unordered pair of distinct poles, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolePair(Pole, Pole);

impl PolePair {
    pub fn new(a: Pole, b: Pole) -> Result<Self, HatError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(PolePair(a, b)),
            std::cmp::Ordering::Greater => Ok(PolePair(b, a)),
            std::cmp::Ordering::Equal => Err(HatError::InvalidPair(a)),
        }
    }

    pub fn poles(&self) -> (Pole, Pole) {
        (self.0, self.1)
    }

    pub fn contains(&self, pole: Pole) -> bool {
        self.0 == pole || self.1 == pole
    }
}

impl fmt::Display for PolePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

/// The default ten triads: the {Community, Object, Subject} core plus, for
/// each of Rules, DivisionOfLabour and Tools, that pole joined with every
/// 2-subset of the core.
pub fn default_triads() -> Vec<Triad> {
    use Pole::*;
    let core = [Community, Object, Subject];
    let mut triads = vec![Triad::new(Community, Object, Subject).expect("distinct")];
    for specialty in [Rules, DivisionOfLabour, Tools] {
        for (i, a) in core.iter().enumerate() {
            for b in &core[i + 1..] {
                triads.push(Triad::new(specialty, *a, *b).expect("distinct"));
            }
        }
    }
    triads
}

/// Parses a triad file: one triad per line, poles separated by commas,
/// `#` comments.
pub fn parse_triads(text: &str) -> Result<Vec<Triad>, HatError> {
    content_lines(text)
        .map(|(line, content)| {
            content.parse().map_err(|e: HatError| HatError::Syntax { line, message: e.to_string() })
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((i + 1, content))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseCase {
    pub id: String,
    pub description: String,
    pub involvements: BTreeSet<Triad>,
}

impl UseCase {
    pub fn new(id: impl Into<String>, description: impl Into<String>, involvements: impl IntoIterator<Item = Triad>) -> Self {
        UseCase { id: id.into(), description: description.into(), involvements: involvements.into_iter().collect() }
    }
}

/// The three reference use cases, each involved in every given triad.
pub fn default_use_cases(triads: &[Triad]) -> Vec<UseCase> {
    [
        ("case1", "Naakosenda cultural community organising a cultural event in Mokolo"),
        ("case2", "CDE-SAARE building a rural library in Kolara"),
        ("case3", "Club 2-0 organising a holidays soccer tournament at College L'Espoir, Maroua"),
    ]
    .into_iter()
    .map(|(id, description)| UseCase::new(id, description, triads.iter().copied()))
    .collect()
}

/// Pole implication counts per use case, with column totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationTable {
    pub rows: Vec<(String, BTreeMap<Pole, usize>)>,
    pub totals: BTreeMap<Pole, usize>,
}

impl ImplicationTable {
    pub fn row(&self, case: &str) -> Option<&BTreeMap<Pole, usize>> {
        self.rows.iter().find(|(id, _)| id == case).map(|(_, row)| row)
    }

    /// Counts in [`Pole::TABLE_ORDER`].
    pub fn ordered(counts: &BTreeMap<Pole, usize>) -> [usize; 6] {
        Pole::TABLE_ORDER.map(|p| counts.get(&p).copied().unwrap_or(0))
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let header: Vec<&str> = std::iter::once("case").chain(Pole::TABLE_ORDER.iter().map(|p| p.name())).collect();
        let mut lines = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
        for (id, row) in &self.rows {
            lines.push(std::iter::once(id.clone()).chain(Self::ordered(row).iter().map(usize::to_string)).collect());
        }
        lines.push(
            std::iter::once("Total".to_string())
                .chain(Self::ordered(&self.totals).iter().map(usize::to_string))
                .collect(),
        );
        let widths: Vec<usize> = (0..header.len())
            .map(|col| lines.iter().map(|l| l[col].len()).max().unwrap_or(0))
            .collect();
        lines
            .iter()
            .map(|cells| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
                    + "\n"
            })
            .collect()
    }
}

pub fn implication_table(triads: &[Triad], cases: &[UseCase]) -> Result<ImplicationTable, HatError> {
    let known: BTreeSet<&Triad> = triads.iter().collect();
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    let mut totals: BTreeMap<Pole, usize> = Pole::ALL.iter().map(|&p| (p, 0)).collect();
    for case in cases {
        if !seen.insert(case.id.as_str()) {
            return Err(HatError::DuplicateCase(case.id.clone()));
        }
        let mut row: BTreeMap<Pole, usize> = Pole::ALL.iter().map(|&p| (p, 0)).collect();
        for triad in &case.involvements {
            if !known.contains(triad) {
                return Err(HatError::UnknownTriad { case: case.id.clone(), triad: *triad });
            }
            for pole in triad.poles() {
                *row.get_mut(&pole).expect("all poles present") += 1;
                *totals.get_mut(&pole).expect("all poles present") += 1;
            }
        }
        rows.push((case.id.clone(), row));
    }
    Ok(ImplicationTable { rows, totals })
}

/// A directed, named edge proposed by one triad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRelation {
    pub name: String,
    pub source: Pole,
    pub target: Pole,
    pub origin: Triad,
}

/// Names for the three directed edges of each triad.
pub type TriadNaming = BTreeMap<Triad, [(String, Pole, Pole); 3]>;

/// Edges the analysis names explicitly; every other edge is synthesized as
/// `relatesTo_<Source>_<Target>`.
pub const NAMED_EDGES: [(&str, Pole, Pole); 4] = [
    ("isRespectedBy", Pole::Rules, Pole::Object),
    ("isOrganisedBy", Pole::Object, Pole::Community),
    ("isRegulatedBy", Pole::Community, Pole::Rules),
    ("belongsTo", Pole::Tools, Pole::Community),
];

/// For each triad, the 3-cycle orientation agreeing with the most named
/// edges (ties go to sorted-pole order).
pub fn default_naming(triads: &[Triad]) -> TriadNaming {
    let edge_name = |s: Pole, t: Pole| -> String {
        NAMED_EDGES
            .iter()
            .find(|(_, a, b)| *a == s && *b == t)
            .map(|(n, _, _)| n.to_string())
            .unwrap_or_else(|| format!("relatesTo_{s}_{t}"))
    };
    let agreement = |edges: &[(Pole, Pole); 3]| {
        edges
            .iter()
            .filter(|(s, t)| NAMED_EDGES.iter().any(|(_, a, b)| a == s && b == t))
            .count()
    };
    triads
        .iter()
        .map(|triad| {
            let [a, b, c] = triad.poles();
            let forward = [(a, b), (b, c), (c, a)];
            let backward = [(a, c), (c, b), (b, a)];
            let chosen = if agreement(&backward) > agreement(&forward) { backward } else { forward };
            (*triad, chosen.map(|(s, t)| (edge_name(s, t), s, t)))
        })
        .collect()
}

fn is_three_cycle(triad: &Triad, edges: &[(String, Pole, Pole); 3]) -> bool {
    let poles = triad.poles();
    let covers = |f: fn(&(String, Pole, Pole)) -> Pole| {
        let mut seen: Vec<Pole> = edges.iter().map(f).collect();
        seen.sort();
        seen == poles
    };
    edges.iter().all(|(_, s, t)| s != t && triad.contains(*s) && triad.contains(*t))
        && covers(|e| e.1)
        && covers(|e| e.2)
}

/// Three candidates per triad, in triad order.
pub fn candidate_relations(triads: &[Triad], naming: &TriadNaming) -> Result<Vec<CandidateRelation>, HatError> {
    let mut out = Vec::with_capacity(triads.len() * 3);
    for triad in triads {
        let edges = naming.get(triad).ok_or(HatError::MissingNaming(*triad))?;
        if !is_three_cycle(triad, edges) {
            return Err(HatError::NotACycle(*triad));
        }
        out.extend(edges.iter().map(|(name, source, target)| CandidateRelation {
            name: name.clone(),
            source: *source,
            target: *target,
            origin: *triad,
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionStats {
    pub candidates: usize,
    pub pairs: usize,
    /// `1 - pairs / candidates`, 0 when there are no candidates.
    pub reduction: f64,
}

impl ReductionStats {
    pub fn reduction_percent(&self) -> f64 {
        self.reduction * 100.0
    }
}

/// Collapses candidates to distinct unordered pole pairs.
pub fn dedupe_pairs(candidates: &[CandidateRelation]) -> (BTreeSet<PolePair>, ReductionStats) {
    let pairs: BTreeSet<PolePair> = candidates
        .iter()
        .map(|c| PolePair::new(c.source, c.target).expect("candidate endpoints are distinct"))
        .collect();
    let reduction = if candidates.is_empty() {
        0.0
    } else {
        1.0 - pairs.len() as f64 / candidates.len() as f64
    };
    let stats = ReductionStats { candidates: candidates.len(), pairs: pairs.len(), reduction };
    (pairs, stats)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Keep { name: String, source: Pole, target: Pole },
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub pair: PolePair,
    pub verdict: Verdict,
    pub justification: String,
}

/// Auditable keep/drop record for pole pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionTable {
    pub entries: Vec<Decision>,
}

impl DecisionTable {
    /// The shipped table.
    pub fn default_table() -> Self {
        DEFAULT_DECISIONS.parse().expect("bundled decision table parses")
    }

    pub fn get(&self, pair: &PolePair) -> Option<&Decision> {
        self.entries.iter().find(|d| d.pair == *pair)
    }

    /// Same pairs, every verdict `drop`.
    pub fn all_dropped(pairs: &BTreeSet<PolePair>) -> Self {
        DecisionTable {
            entries: pairs
                .iter()
                .map(|&pair| Decision { pair, verdict: Verdict::Drop, justification: String::new() })
                .collect(),
        }
    }
}

impl FromStr for DecisionTable {
    type Err = HatError;

    /// Line format: `A, B | keep|drop | name | Source -> Target | justification`,
    /// `-` for empty fields, `#` starts a comment line.
    fn from_str(text: &str) -> Result<Self, HatError> {
        let mut entries: Vec<Decision> = Vec::new();
        for (line, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let syntax = |message: String| HatError::Syntax { line, message };
            let fields: Vec<&str> = content.splitn(5, '|').map(str::trim).collect();
            let [pair, verdict, name, direction, justification] = fields.as_slice() else {
                return Err(syntax(format!("expected 5 '|'-separated fields, found {}", fields.len())));
            };
            let poles: Vec<Pole> = pair
                .split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e: HatError| syntax(e.to_string()))?;
            let [a, b] = poles.as_slice() else {
                return Err(syntax(format!("pair {pair:?} must name two poles")));
            };
            let pair = PolePair::new(*a, *b).map_err(|e| syntax(e.to_string()))?;
            let empty = |s: &str| s.is_empty() || s == "-";
            let verdict = match verdict.to_ascii_lowercase().as_str() {
                "keep" => {
                    if empty(name) || empty(direction) {
                        return Err(syntax("a keep entry needs a name and a direction".into()));
                    }
                    let (source, target) = direction
                        .split_once("->")
                        .ok_or_else(|| syntax(format!("direction {direction:?} must read `Source -> Target`")))?;
                    let source: Pole = source.parse().map_err(|e: HatError| syntax(e.to_string()))?;
                    let target: Pole = target.parse().map_err(|e: HatError| syntax(e.to_string()))?;
                    Verdict::Keep { name: name.to_string(), source, target }
                }
                "drop" => Verdict::Drop,
                other => return Err(syntax(format!("verdict must be keep or drop, found {other:?}"))),
            };
            if entries.iter().any(|d| d.pair == pair) {
                return Err(syntax(format!("pair {pair} is listed twice")));
            }
            let justification = if empty(justification) { String::new() } else { justification.to_string() };
            entries.push(Decision { pair, verdict, justification });
        }
        Ok(DecisionTable { entries })
    }
}

impl fmt::Display for DecisionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# pair | verdict | name | direction | justification")?;
        for d in &self.entries {
            let (a, b) = d.pair.poles();
            let just = if d.justification.is_empty() { "-" } else { &d.justification };
            match &d.verdict {
                Verdict::Keep { name, source, target } => {
                    writeln!(f, "{a}, {b} | keep | {name} | {source} -> {target} | {just}")?
                }
                Verdict::Drop => writeln!(f, "{a}, {b} | drop | - | - | {just}")?,
            }
        }
        Ok(())
    }
}

/// Relation endpoint: a pole of the model, or the locality concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Pole(Pole),
    Locality,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Pole(p) => p.fmt(f),
            Node::Locality => f.write_str("Locality"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedRelation {
    pub name: String,
    pub source: Node,
    pub target: Node,
}

impl DirectedRelation {
    pub fn new(name: impl Into<String>, source: Node, target: Node) -> Self {
        DirectedRelation { name: name.into(), source, target }
    }
}

impl fmt::Display for DirectedRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({} -> {})", self.name, self.source, self.target)
    }
}

/// Keep entries for the given pairs, in table order.
pub fn apply_decisions(pairs: &BTreeSet<PolePair>, table: &DecisionTable) -> Result<Vec<DirectedRelation>, HatError> {
    for pair in pairs {
        if table.get(pair).is_none() {
            return Err(HatError::UncoveredPair(*pair));
        }
    }
    let mut kept = Vec::new();
    for d in table.entries.iter().filter(|d| pairs.contains(&d.pair)) {
        if let Verdict::Keep { name, source, target } = &d.verdict {
            if PolePair::new(*source, *target).ok() != Some(d.pair) {
                return Err(HatError::DirectionMismatch { pair: d.pair, from: *source, to: *target });
            }
            kept.push(DirectedRelation::new(name.clone(), Node::Pole(*source), Node::Pole(*target)));
        }
    }
    Ok(kept)
}

/// Number of relations between poles the default decisions keep.
pub const POLE_RELATION_COUNT: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    pub relations: Vec<DirectedRelation>,
    pub warnings: Vec<String>,
}

/// Appends the locality relations. Input of a size other than
/// [`POLE_RELATION_COUNT`] is accepted with a warning.
pub fn full_relation_set(pole_relations: Vec<DirectedRelation>) -> RelationSet {
    let mut warnings = Vec::new();
    if pole_relations.len() != POLE_RELATION_COUNT {
        warnings.push(format!(
            "expected {POLE_RELATION_COUNT} pole relations, got {}; locality relations appended anyway",
            pole_relations.len()
        ));
    }
    let mut relations = pole_relations;
    relations.extend([
        DirectedRelation::new("isLocatedIn", Node::Pole(Pole::Community), Node::Locality),
        DirectedRelation::new("isOccuredIn", Node::Pole(Pole::Object), Node::Locality),
        DirectedRelation::new("isBorderdBy", Node::Locality, Node::Locality),
    ]);
    RelationSet { relations, warnings }
}

/// Pole (and locality) → concept IRI.
pub type ConceptMapping = BTreeMap<Node, Iri>;

/// Tools→Resource, Object→Activity, Subject→Individual, Rules→Regulations,
/// Community→Community, DivisionOfLabour→Role, Locality→Locality.
pub fn default_concept_mapping() -> ConceptMapping {
    [
        (Node::Pole(Pole::Tools), "Resource"),
        (Node::Pole(Pole::Object), "Activity"),
        (Node::Pole(Pole::Subject), "Individual"),
        (Node::Pole(Pole::Rules), "Regulations"),
        (Node::Pole(Pole::Community), "Community"),
        (Node::Pole(Pole::DivisionOfLabour), "Role"),
        (Node::Locality, "Locality"),
    ]
    .into_iter()
    .map(|(node, local)| (node, ontosoc::term(local)))
    .collect()
}

/// Replaces endpoints by their concepts; property IRIs live in the OntoSOC
/// namespace.
pub fn map_to_concepts(relations: &[DirectedRelation], mapping: &ConceptMapping) -> Result<Vec<PropertyDef>, HatError> {
    let concept = |node: Node| mapping.get(&node).cloned().ok_or(HatError::UnmappedNode(node));
    relations
        .iter()
        .map(|r| {
            let iri = Iri::new(format!("{}{}", ontosoc::NS, r.name))
                .map_err(|e| HatError::Syntax { line: 0, message: e.to_string() })?;
            Ok(PropertyDef::new(iri, concept(r.source)?, concept(r.target)?))
        })
        .collect()
}

/// Inputs of the derivation pipeline.
#[derive(Debug, Clone)]
pub struct DerivationConfig {
    pub triads: Vec<Triad>,
    pub cases: Vec<UseCase>,
    pub naming: TriadNaming,
    pub decisions: DecisionTable,
    pub mapping: ConceptMapping,
}

impl Default for DerivationConfig {
    fn default() -> Self {
        DerivationConfig::with_triads(default_triads())
    }
}

impl DerivationConfig {
    /// Defaults for everything except the triad set.
    pub fn with_triads(triads: Vec<Triad>) -> Self {
        DerivationConfig {
            cases: default_use_cases(&triads),
            naming: default_naming(&triads),
            decisions: DecisionTable::default_table(),
            mapping: default_concept_mapping(),
            triads,
        }
    }
}

/// Every intermediate product of a pipeline run.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub implications: ImplicationTable,
    pub candidates: Vec<CandidateRelation>,
    pub pairs: BTreeSet<PolePair>,
    pub stats: ReductionStats,
    pub relations: Vec<DirectedRelation>,
    pub properties: Vec<PropertyDef>,
    pub warnings: Vec<String>,
    pub schema: SchemaDef,
}

pub fn derive(config: &DerivationConfig) -> Result<Derivation, HatError> {
    let implications = implication_table(&config.triads, &config.cases)?;
    let candidates = candidate_relations(&config.triads, &config.naming)?;
    let (pairs, stats) = dedupe_pairs(&candidates);
    let kept = apply_decisions(&pairs, &config.decisions)?;
    let RelationSet { relations, mut warnings } = full_relation_set(kept);
    if config.triads.len() != REPORTED_TRIAD_COUNT {
        warnings.push(format!(
            "triad set has {} triads; the documented count is {REPORTED_TRIAD_COUNT}",
            config.triads.len()
        ));
    }
    let properties = map_to_concepts(&relations, &config.mapping)?;

    let mut classes = schema::upper_class_defs();
    for iri in config.mapping.values() {
        if !classes.iter().any(|c| c.iri == *iri) {
            let label = iri.as_str().strip_prefix(ontosoc::NS).unwrap_or(iri.as_str());
            classes.push(schema::ClassDef::upper(iri.clone(), label));
        }
    }
    classes.extend(schema::default_hierarchy());
    let schema = SchemaDef::new(
        ontosoc::term(""),
        classes,
        schema::with_compatibility_layer(properties.clone()),
        schema::pairwise_disjoint_uppers(),
        schema::default_alignments(),
    )?;
    Ok(Derivation { implications, candidates, pairs, stats, relations, properties, warnings, schema })
}

/// The schema produced by the default pipeline.
pub fn derive_schema() -> SchemaDef {
    derive(&DerivationConfig::default())
        .expect("default derivation succeeds")
        .schema
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pole::*;

    fn triad(a: Pole, b: Pole, c: Pole) -> Triad {
        Triad::new(a, b, c).unwrap()
    }

    #[test]
    fn default_triad_set() {
        let triads = default_triads();
        assert_eq!(triads.len(), 10);
        assert!(triads.contains(&triad(Rules, Object, Community)));
        assert!(triads.contains(&triad(Subject, Community, Tools)));
        assert!(triads.contains(&triad(Tools, Community, Object)));
        let unique: BTreeSet<_> = triads.iter().collect();
        assert_eq!(unique.len(), 10);
    }

    #[test]
    fn triads_reject_repeats() {
        assert!(Triad::new(Rules, Rules, Object).is_err());
        assert_eq!("Rules, Object, Community".parse::<Triad>().unwrap(), triad(Community, Object, Rules));
        assert_eq!("Division of Labour, Subject, Tools".parse::<Triad>().unwrap(), triad(DivisionOfLabour, Subject, Tools));
        assert!("Rules, Object".parse::<Triad>().is_err());
    }

    #[test]
    fn single_triad_case() {
        let t = triad(Rules, Object, Community);
        let table = implication_table(&[t], &[UseCase::new("c", "", [t])]).unwrap();
        assert_eq!(ImplicationTable::ordered(table.row("c").unwrap()), [1, 1, 0, 1, 0, 0]);
    }

    #[test]
    fn unknown_involvement_is_an_error() {
        let t = triad(Rules, Object, Community);
        let other = triad(Tools, Object, Community);
        assert!(matches!(
            implication_table(&[t], &[UseCase::new("c", "", [other])]),
            Err(HatError::UnknownTriad { .. })
        ));
    }

    #[test]
    fn fig2_triad_names() {
        let t = triad(Rules, Object, Community);
        let c = candidate_relations(&[t], &default_naming(&[t])).unwrap();
        let names: BTreeSet<_> = c.iter().map(|c| (c.name.as_str(), c.source, c.target)).collect();
        assert_eq!(
            names,
            BTreeSet::from([
                ("isRespectedBy", Rules, Object),
                ("isOrganisedBy", Object, Community),
                ("isRegulatedBy", Community, Rules),
            ])
        );
        assert!(candidate_relations(&[], &TriadNaming::new()).unwrap().is_empty());
    }

    #[test]
    fn naming_errors() {
        let t = triad(Rules, Object, Community);
        assert_eq!(candidate_relations(&[t], &TriadNaming::new()), Err(HatError::MissingNaming(t)));
        let mut naming = TriadNaming::new();
        naming.insert(t, [("x".into(), Rules, Object), ("y".into(), Object, Rules), ("z".into(), Community, Rules)]);
        assert_eq!(candidate_relations(&[t], &naming), Err(HatError::NotACycle(t)));
    }

    #[test]
    fn tools_community_edges_use_the_named_edge() {
        let triads = default_triads();
        let naming = default_naming(&triads);
        for t in [triad(Subject, Community, Tools), triad(Tools, Community, Object)] {
            assert!(naming[&t].iter().any(|(n, s, d)| n == "belongsTo" && *s == Tools && *d == Community));
        }
        let t = triad(Subject, Object, DivisionOfLabour);
        assert!(naming[&t].iter().all(|(n, _, _)| n.starts_with("relatesTo_")));
    }

    #[test]
    fn dedupe_examples() {
        let t = triad(Rules, Object, Community);
        let naming = default_naming(&[t]);
        let one = candidate_relations(&[t], &naming).unwrap();
        let (pairs, stats) = dedupe_pairs(&one);
        assert_eq!((pairs.len(), stats.reduction), (3, 0.0));
        let twice = candidate_relations(&[t, t], &naming).unwrap();
        let (pairs2, stats2) = dedupe_pairs(&twice);
        assert_eq!(pairs2, pairs);
        assert!(stats2.reduction > stats.reduction);
        assert_eq!(dedupe_pairs(&[]).1.reduction, 0.0);
    }

    #[test]
    fn decision_table_round_trip_and_errors() {
        let table = DecisionTable::default_table();
        assert_eq!(table.entries.len(), 12);
        assert_eq!(table.to_string().parse::<DecisionTable>().unwrap(), table);
        assert!(matches!(
            "Tools, Subject | keep | - | - | x".parse::<DecisionTable>(),
            Err(HatError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            "Tools, Subject | maybe | - | - | x".parse::<DecisionTable>(),
            Err(HatError::Syntax { .. })
        ));
        assert!(matches!("Tools | drop | - | - | x".parse::<DecisionTable>(), Err(HatError::Syntax { .. })));
    }

    #[test]
    fn tools_community_is_dropped() {
        let table = DecisionTable::default_table();
        let d = table.get(&PolePair::new(Tools, Community).unwrap()).unwrap();
        assert_eq!(d.verdict, Verdict::Drop);
        assert!(!d.justification.is_empty());
    }

    #[test]
    fn apply_decisions_errors_and_all_drop() {
        let pair = PolePair::new(Tools, Subject).unwrap();
        let pairs = BTreeSet::from([pair]);
        assert_eq!(apply_decisions(&pairs, &DecisionTable::default()), Err(HatError::UncoveredPair(pair)));
        assert!(apply_decisions(&pairs, &DecisionTable::all_dropped(&pairs)).unwrap().is_empty());
        let wrong: DecisionTable = "Tools, Subject | keep | x | Tools -> Rules | -".parse().unwrap();
        assert!(matches!(apply_decisions(&pairs, &wrong), Err(HatError::DirectionMismatch { .. })));
    }

    #[test]
    fn relation_set_appends_locality() {
        let empty = full_relation_set(Vec::new());
        assert_eq!(empty.relations.len(), 3);
        assert_eq!(empty.warnings.len(), 1);
        assert!(empty.relations.iter().any(|r| r.name == "isBorderdBy"));
    }

    #[test]
    fn concept_mapping() {
        let mapping = default_concept_mapping();
        let used_by = DirectedRelation::new("isUsedBy", Node::Pole(Tools), Node::Pole(Subject));
        let p = &map_to_concepts(std::slice::from_ref(&used_by), &mapping).unwrap()[0];
        assert_eq!((p.domain.clone(), p.range.clone()), (ontosoc::term("Resource"), ontosoc::term("Individual")));
        let realised = DirectedRelation::new("isRealisedBy", Node::Pole(DivisionOfLabour), Node::Pole(Object));
        let p = &map_to_concepts(&[realised], &mapping).unwrap()[0];
        assert_eq!((p.domain.clone(), p.range.clone()), (ontosoc::term("Role"), ontosoc::term("Activity")));

        let identity: ConceptMapping = Pole::ALL
            .iter()
            .map(|&p| (Node::Pole(p), ontosoc::term(p.name())))
            .chain([(Node::Locality, ontosoc::term("Locality"))])
            .collect();
        let p = &map_to_concepts(std::slice::from_ref(&used_by), &identity).unwrap()[0];
        assert_eq!(p.iri, ontosoc::term("isUsedBy"));
        assert_eq!(p.domain, ontosoc::term("Tools"));

        let mut partial = mapping.clone();
        partial.remove(&Node::Pole(Tools));
        assert_eq!(map_to_concepts(&[used_by], &partial), Err(HatError::UnmappedNode(Node::Pole(Tools))));
    }

    #[test]
    fn derivation_is_deterministic() {
        let a = derive(&DerivationConfig::default()).unwrap();
        let b = derive(&DerivationConfig::default()).unwrap();
        assert_eq!(a.relations, b.relations);
        assert_eq!(a.schema, b.schema);
        assert_eq!(a.schema.upper_classes().count(), 7);
    }
}
