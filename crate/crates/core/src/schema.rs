//! The OntoSOC ontology as data.
//!
//! A [`SchemaDef`] holds the class forest, the property signatures (ten
//! canonical relations plus compatibility properties), pairwise disjointness
//! of the upper-level classes and the alignment to external vocabularies.
//! It converts to and from an OWL/RDFS graph, so a replacement schema can be
//! loaded from a Turtle file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rdf::{Graph, Iri, Literal, Pattern, Term, Triple};
use crate::vocab::{dbo, foaf, ontosoc, owl, rdf, rdfs, schema_org, wai};

/// Number of root classes every schema must have.
pub const UPPER_CLASS_COUNT: usize = 7;
/// Number of canonical (non-compatibility) properties every schema must have.
pub const CANONICAL_PROPERTY_COUNT: usize = 10;
/// Deepest allowed subclass level below an upper class.
pub const MAX_SUBCLASS_DEPTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("class {0} is declared more than once")]
    DuplicateClass(Iri),
    #[error("property {0} is declared more than once (as a property or an alias)")]
    DuplicateProperty(Iri),
    #[error("subclass cycle through {0}")]
    Cycle(Iri),
    #[error("class {class} is {depth} levels below its upper class; the limit is {MAX_SUBCLASS_DEPTH}")]
    TooDeep { class: Iri, depth: usize },
    #[error("class {0} must not have subclasses")]
    LeafClassSpecialized(Iri),
    #[error("expected {UPPER_CLASS_COUNT} upper-level classes, found {0}")]
    UpperClassCount(usize),
    #[error("expected {CANONICAL_PROPERTY_COUNT} canonical properties, found {0}")]
    CanonicalPropertyCount(usize),
    #[error("property {property} refers to undeclared class {class}")]
    UndeclaredSignatureClass { property: Iri, class: Iri },
    #[error("property {property} refers to undeclared property {target}")]
    UndeclaredProperty { property: Iri, target: Iri },
    #[error("alias {0} repeats its canonical IRI")]
    AliasIsCanonical(Iri),
    #[error("disjointness axiom relates {0} to itself")]
    SelfDisjoint(Iri),
    #[error("alignment source {0} is outside the schema namespace")]
    AlignmentSourceOutside(Iri),
    #[error("alignment target {0} is inside the schema namespace")]
    AlignmentTargetInside(Iri),
    #[error("schema graph is malformed: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassDef {
    pub iri: Iri,
    pub label: String,
    /// `None` for upper-level classes.
    pub superclass: Option<Iri>,
}

impl ClassDef {
    pub fn upper(iri: Iri, label: impl Into<String>) -> Self {
        ClassDef { iri, label: label.into(), superclass: None }
    }

    pub fn sub(iri: Iri, label: impl Into<String>, superclass: Iri) -> Self {
        ClassDef { iri, label: label.into(), superclass: Some(superclass) }
    }
}

/// A property signature.
///
/// Canonical properties have `compatibility_of == None`. Compatibility
/// properties keep their own domain and range and point at the canonical
/// relation they restate in another direction. `aliases` are alternative
/// spellings sharing this exact signature. `accepts_signature_of` lists
/// other properties whose signature is also acceptable for triples using
/// this IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PropertyDef {
    pub iri: Iri,
    pub domain: Iri,
    pub range: Iri,
    pub aliases: Vec<Iri>,
    pub compatibility_of: Option<Iri>,
    pub accepts_signature_of: Vec<Iri>,
}

impl PropertyDef {
    pub fn new(iri: Iri, domain: Iri, range: Iri) -> Self {
        PropertyDef {
            iri,
            domain,
            range,
            aliases: Vec::new(),
            compatibility_of: None,
            accepts_signature_of: Vec::new(),
        }
    }

    pub fn with_aliases(mut self, aliases: impl IntoIterator<Item = Iri>) -> Self {
        self.aliases.extend(aliases);
        self
    }

    pub fn compatibility_of(mut self, canonical: Iri) -> Self {
        self.compatibility_of = Some(canonical);
        self
    }

    pub fn accepting_signature_of(mut self, other: Iri) -> Self {
        self.accepts_signature_of.push(other);
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.compatibility_of.is_none()
    }

    /// Local name within `namespace`, or the full IRI.
    pub fn local_name<'a>(&'a self, namespace: &str) -> &'a str {
        self.iri.as_str().strip_prefix(namespace).unwrap_or(self.iri.as_str())
    }
}

/// Unordered pair of disjoint classes, stored with `first < second`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DisjointnessAxiom {
    first: Iri,
    second: Iri,
}

impl DisjointnessAxiom {
    pub fn new(a: Iri, b: Iri) -> Result<Self, SchemaError> {
        if a == b {
            return Err(SchemaError::SelfDisjoint(a));
        }
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        Ok(DisjointnessAxiom { first, second })
    }

    pub fn classes(&self) -> (&Iri, &Iri) {
        (&self.first, &self.second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlignmentKind {
    EquivalentClass,
    SubClassOf,
    EquivalentProperty,
}

impl AlignmentKind {
    pub fn predicate(self) -> Iri {
        match self {
            AlignmentKind::EquivalentClass => owl::equivalent_class(),
            AlignmentKind::SubClassOf => rdfs::sub_class_of(),
            AlignmentKind::EquivalentProperty => owl::equivalent_property(),
        }
    }
}

impl fmt::Display for AlignmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignmentKind::EquivalentClass => "equivalent-class",
            AlignmentKind::SubClassOf => "subclass-of",
            AlignmentKind::EquivalentProperty => "equivalent-property",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlignmentMapping {
    pub source: Iri,
    pub target: Iri,
    pub kind: AlignmentKind,
}

impl AlignmentMapping {
    pub fn new(source: Iri, kind: AlignmentKind, target: Iri) -> Self {
        AlignmentMapping { source, target, kind }
    }

    pub fn to_triple(&self) -> Triple {
        Triple::from_iris(self.source.clone(), self.kind.predicate(), self.target.clone())
    }
}

/// A validated ontology schema. Immutable once built; every invariant is
/// checked in [`SchemaDef::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDef {
    namespace: Iri,
    classes: Vec<ClassDef>,
    properties: Vec<PropertyDef>,
    disjointness: Vec<DisjointnessAxiom>,
    alignments: Vec<AlignmentMapping>,
    class_index: BTreeMap<Iri, usize>,
    property_index: BTreeMap<Iri, usize>,
}

impl SchemaDef {
    pub fn new(
        namespace: Iri,
        classes: Vec<ClassDef>,
        properties: Vec<PropertyDef>,
        disjointness: Vec<DisjointnessAxiom>,
        alignments: Vec<AlignmentMapping>,
    ) -> Result<Self, SchemaError> {
        let mut class_index = BTreeMap::new();
        for (i, c) in classes.iter().enumerate() {
            if class_index.insert(c.iri.clone(), i).is_some() {
                return Err(SchemaError::DuplicateClass(c.iri.clone()));
            }
        }
        let mut property_index = BTreeMap::new();
        for (i, p) in properties.iter().enumerate() {
            if property_index.insert(p.iri.clone(), i).is_some() {
                return Err(SchemaError::DuplicateProperty(p.iri.clone()));
            }
        }
        for (i, p) in properties.iter().enumerate() {
            for alias in &p.aliases {
                if *alias == p.iri {
                    return Err(SchemaError::AliasIsCanonical(alias.clone()));
                }
                if property_index.insert(alias.clone(), i).is_some() {
                    return Err(SchemaError::DuplicateProperty(alias.clone()));
                }
            }
        }
        let schema = SchemaDef {
            namespace,
            classes,
            properties,
            disjointness,
            alignments,
            class_index,
            property_index,
        };
        schema.check()?;
        Ok(schema)
    }

    fn check(&self) -> Result<(), SchemaError> {
        let uppers = self.classes.iter().filter(|c| c.superclass.is_none()).count();
        if uppers != UPPER_CLASS_COUNT {
            return Err(SchemaError::UpperClassCount(uppers));
        }
        for c in &self.classes {
            if let Some(sup) = &c.superclass {
                if !self.class_index.contains_key(sup) {
                    return Err(SchemaError::UnknownClass(sup.clone()));
                }
            }
        }
        for c in &self.classes {
            let depth = self.depth(&c.iri)?;
            if depth > MAX_SUBCLASS_DEPTH {
                return Err(SchemaError::TooDeep { class: c.iri.clone(), depth });
            }
        }
        let individual = ontosoc::term("Individual");
        if self.class_index.contains_key(&individual) && !self.subclasses(&individual).is_empty() {
            return Err(SchemaError::LeafClassSpecialized(individual));
        }
        let canonical = self.properties.iter().filter(|p| p.is_canonical()).count();
        if canonical != CANONICAL_PROPERTY_COUNT {
            return Err(SchemaError::CanonicalPropertyCount(canonical));
        }
        for p in &self.properties {
            for class in [&p.domain, &p.range] {
                if !self.class_index.contains_key(class) {
                    return Err(SchemaError::UndeclaredSignatureClass {
                        property: p.iri.clone(),
                        class: class.clone(),
                    });
                }
            }
            for target in p.compatibility_of.iter().chain(&p.accepts_signature_of) {
                if !self.property_index.contains_key(target) {
                    return Err(SchemaError::UndeclaredProperty {
                        property: p.iri.clone(),
                        target: target.clone(),
                    });
                }
            }
        }
        for axiom in &self.disjointness {
            for class in [&axiom.first, &axiom.second] {
                if !self.class_index.contains_key(class) {
                    return Err(SchemaError::UnknownClass(class.clone()));
                }
            }
        }
        for a in &self.alignments {
            if !a.source.as_str().starts_with(self.namespace.as_str()) {
                return Err(SchemaError::AlignmentSourceOutside(a.source.clone()));
            }
            if a.target.as_str().starts_with(self.namespace.as_str()) {
                return Err(SchemaError::AlignmentTargetInside(a.target.clone()));
            }
        }
        Ok(())
    }

    pub fn namespace(&self) -> &Iri {
        &self.namespace
    }

    pub fn classes(&self) -> &[ClassDef] {
        &self.classes
    }

    pub fn properties(&self) -> &[PropertyDef] {
        &self.properties
    }

    pub fn canonical_properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.iter().filter(|p| p.is_canonical())
    }

    pub fn disjointness(&self) -> &[DisjointnessAxiom] {
        &self.disjointness
    }

    pub fn alignments(&self) -> &[AlignmentMapping] {
        &self.alignments
    }

    pub fn upper_classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.iter().filter(|c| c.superclass.is_none())
    }

    pub fn class(&self, iri: &Iri) -> Option<&ClassDef> {
        self.class_index.get(iri).map(|&i| &self.classes[i])
    }

    pub fn has_class(&self, iri: &Iri) -> bool {
        self.class_index.contains_key(iri)
    }

    /// Direct subclasses of `iri`.
    pub fn subclasses(&self, iri: &Iri) -> Vec<&Iri> {
        self.classes
            .iter()
            .filter(|c| c.superclass.as_ref() == Some(iri))
            .map(|c| &c.iri)
            .collect()
    }

    /// Number of subclass edges between `iri` and its upper class.
    pub fn depth(&self, iri: &Iri) -> Result<usize, SchemaError> {
        let mut current = self.class(iri).ok_or_else(|| SchemaError::UnknownClass(iri.clone()))?;
        let mut depth = 0;
        while let Some(sup) = &current.superclass {
            depth += 1;
            if depth > self.classes.len() {
                return Err(SchemaError::Cycle(iri.clone()));
            }
            current = self.class(sup).ok_or_else(|| SchemaError::UnknownClass(sup.clone()))?;
        }
        Ok(depth)
    }

    /// Deepest subclass level found under `upper` (0 when it has none).
    pub fn max_depth_below(&self, upper: &Iri) -> usize {
        self.classes
            .iter()
            .filter(|c| self.superclass_closure(&c.iri).is_ok_and(|sup| sup.contains(upper)))
            .filter_map(|c| self.depth(&c.iri).ok())
            .max()
            .unwrap_or(0)
    }

    /// Reflexive-transitive closure of the superclass relation.
    pub fn superclass_closure(&self, iri: &Iri) -> Result<BTreeSet<Iri>, SchemaError> {
        let mut closure = BTreeSet::new();
        let mut current = Some(iri.clone());
        while let Some(c) = current {
            let def = self.class(&c).ok_or_else(|| SchemaError::UnknownClass(c.clone()))?;
            if !closure.insert(c.clone()) {
                return Err(SchemaError::Cycle(c));
            }
            current = def.superclass.clone();
        }
        Ok(closure)
    }

    /// Resolves a canonical IRI, an alias spelling, or a compatibility
    /// property. Alias spellings resolve to their canonical definition;
    /// compatibility properties resolve to their own definition.
    pub fn lookup_property(&self, iri: &Iri) -> Option<&PropertyDef> {
        self.property_index.get(iri).map(|&i| &self.properties[i])
    }

    /// Disjointness test for two declared classes.
    pub fn are_disjoint(&self, a: &Iri, b: &Iri) -> bool {
        DisjointnessAxiom::new(a.clone(), b.clone())
            .is_ok_and(|axiom| self.disjointness.contains(&axiom))
    }

    /// Same content regardless of declaration order.
    pub fn equivalent(&self, other: &SchemaDef) -> bool {
        fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort();
            v
        }
        fn normalize(p: &PropertyDef) -> PropertyDef {
            let mut p = p.clone();
            p.aliases.sort();
            p.accepts_signature_of.sort();
            p
        }
        let props = |s: &SchemaDef| {
            let mut v: Vec<_> = s.properties.iter().map(normalize).collect();
            v.sort();
            v
        };
        self.namespace == other.namespace
            && sorted(&self.classes) == sorted(&other.classes)
            && props(self) == props(other)
            && sorted(&self.disjointness) == sorted(&other.disjointness)
            && sorted(&self.alignments) == sorted(&other.alignments)
    }

    /// Copy of this schema with extra classes, re-validated.
    pub fn with_classes(&self, extra: impl IntoIterator<Item = ClassDef>) -> Result<SchemaDef, SchemaError> {
        let mut classes = self.classes.clone();
        classes.extend(extra);
        SchemaDef::new(
            self.namespace.clone(),
            classes,
            self.properties.clone(),
            self.disjointness.clone(),
            self.alignments.clone(),
        )
    }

    /// Copy of this schema with a different alignment table.
    pub fn with_alignments(&self, alignments: Vec<AlignmentMapping>) -> Result<SchemaDef, SchemaError> {
        SchemaDef::new(
            self.namespace.clone(),
            self.classes.clone(),
            self.properties.clone(),
            self.disjointness.clone(),
            alignments,
        )
    }
}

fn os(local: &str) -> Iri {
    ontosoc::term(local)
}

fn ext(ns: &str, local: &str) -> Iri {
    Iri::new_unchecked(&format!("{ns}{local}"))
}

/// Upper-level classes, in declaration order.
pub const UPPER_CLASSES: [&str; 7] =
    ["Community", "Resource", "Regulations", "Activity", "Individual", "Locality", "Role"];

/// Default sub-concepts. `Individual` has none.
const DEFAULT_SUBCLASSES: [(&str, &str, &str); 15] = [
    ("CulturalActivity", "Cultural activity", "Activity"),
    ("SportActivity", "Sport activity", "Activity"),
    ("EducationalActivity", "Educational activity", "Activity"),
    ("EconomicActivity", "Economic activity", "Activity"),
    ("CulturalCommunity", "Cultural community", "Community"),
    ("SportCommunity", "Sport community", "Community"),
    ("DevelopmentAssociation", "Development association", "Community"),
    ("MaterialResource", "Material resource", "Resource"),
    ("SymbolicResource", "Symbolic resource", "Resource"),
    ("WrittenRegulation", "Written regulation", "Regulations"),
    ("CustomaryRule", "Customary rule", "Regulations"),
    ("Town", "Town", "Locality"),
    ("Village", "Village", "Locality"),
    ("OrganisingRole", "Organising role", "Role"),
    ("ParticipatingRole", "Participating role", "Role"),
];

/// The ten canonical relations: (name, domain, range).
pub const CANONICAL_SIGNATURES: [(&str, &str, &str); 10] = [
    ("isUsedBy", "Resource", "Individual"),
    ("isMemberOf", "Individual", "Community"),
    ("isRegulatedBy", "Community", "Regulations"),
    ("isCreatedBy", "Role", "Community"),
    ("plays", "Individual", "Role"),
    ("isRealisedBy", "Role", "Activity"),
    ("isOrganisedBy", "Activity", "Community"),
    ("isLocatedIn", "Community", "Locality"),
    ("isOccuredIn", "Activity", "Locality"),
    ("isBorderdBy", "Locality", "Locality"),
];

/// Conventional spellings accepted for canonical relations.
const ALIAS_SPELLINGS: [(&str, &str); 2] = [("isOccuredIn", "isOccurredIn"), ("isBorderdBy", "isBorderedBy")];

/// Compatibility properties: (name, domain, range, canonical relation).
const COMPATIBILITY_PROPERTIES: [(&str, &str, &str, &str); 3] = [
    ("isRealizeBy", "Activity", "Role", "isRealisedBy"),
    ("isPlayedBy", "Role", "Individual", "plays"),
    ("usedTool", "Role", "Resource", "isUsedBy"),
];

/// `isUsedBy` is also used task → tool in the community query.
const EXTRA_ACCEPTED_SIGNATURES: [(&str, &str); 1] = [("isUsedBy", "usedTool")];

pub(crate) fn default_hierarchy() -> Vec<ClassDef> {
    DEFAULT_SUBCLASSES
        .iter()
        .map(|(name, label, sup)| ClassDef::sub(os(name), *label, os(sup)))
        .collect()
}

pub(crate) fn upper_class_defs() -> Vec<ClassDef> {
    UPPER_CLASSES.iter().map(|name| ClassDef::upper(os(name), *name)).collect()
}

/// Aliases, compatibility properties and extra accepted signatures layered
/// onto a list of canonical properties.
pub(crate) fn with_compatibility_layer(mut canonical: Vec<PropertyDef>) -> Vec<PropertyDef> {
    for p in &mut canonical {
        let name = p.local_name(ontosoc::NS).to_string();
        for (canon, alias) in ALIAS_SPELLINGS {
            if name == canon {
                p.aliases.push(os(alias));
            }
        }
        for (canon, other) in EXTRA_ACCEPTED_SIGNATURES {
            if name == canon {
                p.accepts_signature_of.push(os(other));
            }
        }
    }
    canonical.extend(
        COMPATIBILITY_PROPERTIES
            .iter()
            .map(|(name, d, r, of)| PropertyDef::new(os(name), os(d), os(r)).compatibility_of(os(of))),
    );
    canonical
}

pub(crate) fn pairwise_disjoint_uppers() -> Vec<DisjointnessAxiom> {
    let mut axioms = Vec::new();
    for (i, a) in UPPER_CLASSES.iter().enumerate() {
        for b in &UPPER_CLASSES[i + 1..] {
            axioms.push(DisjointnessAxiom::new(os(a), os(b)).expect("upper classes are distinct"));
        }
    }
    axioms
}

pub fn default_alignments() -> Vec<AlignmentMapping> {
    use AlignmentKind::*;
    vec![
        AlignmentMapping::new(os("Individual"), EquivalentClass, ext(foaf::NS, "Person")),
        AlignmentMapping::new(os("Community"), SubClassOf, ext(foaf::NS, "Group")),
        AlignmentMapping::new(os("Community"), SubClassOf, ext(schema_org::NS, "Organization")),
        AlignmentMapping::new(os("Role"), EquivalentClass, ext(wai::NS, "Role")),
        AlignmentMapping::new(os("Locality"), SubClassOf, ext(schema_org::NS, "Place")),
        AlignmentMapping::new(os("Locality"), SubClassOf, ext(dbo::NS, "Place")),
        AlignmentMapping::new(os("Activity"), SubClassOf, ext(schema_org::NS, "Event")),
    ]
}

/// The curated OntoSOC schema.
pub fn builtin_schema() -> SchemaDef {
    let mut classes = upper_class_defs();
    classes.extend(default_hierarchy());
    let canonical = CANONICAL_SIGNATURES
        .iter()
        .map(|(name, d, r)| PropertyDef::new(os(name), os(d), os(r)))
        .collect();
    SchemaDef::new(
        Iri::new_unchecked(ontosoc::NS),
        classes,
        with_compatibility_layer(canonical),
        pairwise_disjoint_uppers(),
        default_alignments(),
    )
    .expect("builtin schema satisfies its invariants")
}

fn ontology_iri(namespace: &Iri) -> Iri {
    let s = namespace.as_str();
    Iri::new_unchecked(s.strip_suffix('#').unwrap_or(s))
}

/// OWL/RDFS rendering of a schema.
pub fn schema_to_graph(schema: &SchemaDef) -> Graph {
    let mut g = Graph::new();
    let ty = rdf::type_();
    g.insert(Triple::from_iris(ontology_iri(&schema.namespace), ty.clone(), owl::ontology()));
    for c in &schema.classes {
        g.insert(Triple::from_iris(c.iri.clone(), ty.clone(), owl::class()));
        g.insert(Triple::from_iris(c.iri.clone(), rdfs::label(), Literal::string(&c.label)));
        if let Some(sup) = &c.superclass {
            g.insert(Triple::from_iris(c.iri.clone(), rdfs::sub_class_of(), sup.clone()));
        }
    }
    for p in &schema.properties {
        g.insert(Triple::from_iris(p.iri.clone(), ty.clone(), owl::object_property()));
        g.insert(Triple::from_iris(p.iri.clone(), rdfs::domain(), p.domain.clone()));
        g.insert(Triple::from_iris(p.iri.clone(), rdfs::range(), p.range.clone()));
        for alias in &p.aliases {
            g.insert(Triple::from_iris(alias.clone(), owl::equivalent_property(), p.iri.clone()));
        }
        if let Some(of) = &p.compatibility_of {
            g.insert(Triple::from_iris(p.iri.clone(), ontosoc::compatibility_of(), of.clone()));
        }
        for other in &p.accepts_signature_of {
            g.insert(Triple::from_iris(p.iri.clone(), ontosoc::accepts_signature_of(), other.clone()));
        }
    }
    for axiom in &schema.disjointness {
        g.insert(Triple::from_iris(axiom.first.clone(), owl::disjoint_with(), axiom.second.clone()));
    }
    for a in &schema.alignments {
        g.insert(a.to_triple());
    }
    g
}

/// Only the alignment triples of a schema.
pub fn export_alignment(schema: &SchemaDef) -> Graph {
    schema.alignments.iter().map(AlignmentMapping::to_triple).collect()
}

fn iri_object(t: &Triple) -> Result<Iri, SchemaError> {
    t.object()
        .as_iri()
        .cloned()
        .ok_or_else(|| SchemaError::Malformed(format!("expected an IRI object in `{t}`")))
}

fn iri_subject(t: &Triple) -> Result<Iri, SchemaError> {
    t.subject()
        .as_iri()
        .cloned()
        .ok_or_else(|| SchemaError::Malformed(format!("expected an IRI subject in `{t}`")))
}

fn single_object(g: &Graph, subject: &Iri, predicate: Iri) -> Result<Iri, SchemaError> {
    let s = Term::Iri(subject.clone());
    let p = Term::Iri(predicate.clone());
    let found = g.matches(Pattern::new(Some(&s), Some(&p), None));
    match found.as_slice() {
        [one] => iri_object(one),
        [] => Err(SchemaError::Malformed(format!("{subject} has no {predicate}"))),
        _ => Err(SchemaError::Malformed(format!("{subject} has several {predicate} values"))),
    }
}

/// Reads a schema back from its OWL/RDFS rendering.
///
/// The namespace comes from the single `owl:Ontology` header (plus `#`), or
/// defaults to the OntoSOC namespace when there is no header.
pub fn schema_from_graph(g: &Graph) -> Result<SchemaDef, SchemaError> {
    let ty = Term::Iri(rdf::type_());
    let of_type = |class: Iri| {
        let class = Term::Iri(class);
        g.matches(Pattern::new(None, Some(&ty), Some(&class)))
    };

    let headers = of_type(owl::ontology());
    let namespace = match headers.as_slice() {
        [] => Iri::new_unchecked(ontosoc::NS),
        [one] => Iri::new(format!("{}#", iri_subject(one)?.as_str()))
            .map_err(|e| SchemaError::Malformed(e.to_string()))?,
        _ => return Err(SchemaError::Malformed("several owl:Ontology headers".into())),
    };
    let in_ns = |iri: &Iri| iri.as_str().starts_with(namespace.as_str());

    let mut classes = Vec::new();
    let mut alignments = Vec::new();
    for decl in of_type(owl::class()) {
        let iri = iri_subject(&decl)?;
        let s = Term::Iri(iri.clone());
        let label = g
            .matches(Pattern::new(Some(&s), Some(&Term::Iri(rdfs::label())), None))
            .first()
            .map(|t| t.object().value().to_string())
            .unwrap_or_else(|| iri.as_str().strip_prefix(namespace.as_str()).unwrap_or(iri.as_str()).to_string());
        let mut superclass = None;
        for t in g.matches(Pattern::new(Some(&s), Some(&Term::Iri(rdfs::sub_class_of())), None)) {
            let target = iri_object(&t)?;
            if in_ns(&target) {
                if superclass.replace(target).is_some() {
                    return Err(SchemaError::Malformed(format!("{iri} has several superclasses")));
                }
            } else {
                alignments.push(AlignmentMapping::new(iri.clone(), AlignmentKind::SubClassOf, target));
            }
        }
        classes.push(ClassDef { iri, label, superclass });
    }

    let declared: BTreeSet<Iri> = of_type(owl::object_property())
        .iter()
        .map(iri_subject)
        .collect::<Result<_, _>>()?;
    let mut properties = Vec::new();
    for iri in &declared {
        let s = Term::Iri(iri.clone());
        let objects = |p: Iri| g.matches(Pattern::new(Some(&s), Some(&Term::Iri(p)), None));
        let mut def = PropertyDef::new(
            iri.clone(),
            single_object(g, iri, rdfs::domain())?,
            single_object(g, iri, rdfs::range())?,
        );
        if let Some(t) = objects(ontosoc::compatibility_of()).first() {
            def.compatibility_of = Some(iri_object(t)?);
        }
        for t in objects(ontosoc::accepts_signature_of()) {
            def.accepts_signature_of.push(iri_object(&t)?);
        }
        let o = Term::Iri(iri.clone());
        for t in g.matches(Pattern::new(None, Some(&Term::Iri(owl::equivalent_property())), Some(&o))) {
            let alias = iri_subject(&t)?;
            if in_ns(&alias) && !declared.contains(&alias) {
                def.aliases.push(alias);
            }
        }
        for t in objects(owl::equivalent_property()) {
            let target = iri_object(&t)?;
            if !in_ns(&target) {
                alignments.push(AlignmentMapping::new(iri.clone(), AlignmentKind::EquivalentProperty, target));
            }
        }
        properties.push(def);
    }

    let mut disjointness = Vec::new();
    for t in g.matches(Pattern::new(None, Some(&Term::Iri(owl::disjoint_with())), None)) {
        disjointness.push(DisjointnessAxiom::new(iri_subject(&t)?, iri_object(&t)?)?);
    }
    disjointness.sort();
    disjointness.dedup();

    for t in g.matches(Pattern::new(None, Some(&Term::Iri(owl::equivalent_class())), None)) {
        let source = iri_subject(&t)?;
        alignments.push(AlignmentMapping::new(source, AlignmentKind::EquivalentClass, iri_object(&t)?));
    }

    SchemaDef::new(namespace, classes, properties, disjointness, alignments)
}
