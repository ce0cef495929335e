//! Namespace IRIs and the handful of vocabulary terms the crate needs.

use crate::rdf::Iri;

macro_rules! terms {
    ($ns:expr; $($fn_name:ident / $const_name:ident = $local:literal),* $(,)?) => {
        $(
            pub const $const_name: &str = concat!($ns, $local);
            pub fn $fn_name() -> Iri {
                Iri::new_unchecked($const_name)
            }
        )*
    };
}

pub mod rdf {
    use super::*;
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    terms!("http://www.w3.org/1999/02/22-rdf-syntax-ns#"; type_ / TYPE = "type");
}

pub mod rdfs {
    use super::*;
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    terms!("http://www.w3.org/2000/01/rdf-schema#";
        sub_class_of / SUB_CLASS_OF = "subClassOf",
        domain / DOMAIN = "domain",
        range / RANGE = "range",
        label / LABEL = "label",
        comment / COMMENT = "comment",
    );
}

pub mod owl {
    use super::*;
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    terms!("http://www.w3.org/2002/07/owl#";
        class / CLASS = "Class",
        object_property / OBJECT_PROPERTY = "ObjectProperty",
        ontology / ONTOLOGY = "Ontology",
        disjoint_with / DISJOINT_WITH = "disjointWith",
        equivalent_class / EQUIVALENT_CLASS = "equivalentClass",
        equivalent_property / EQUIVALENT_PROPERTY = "equivalentProperty",
    );
}

pub mod xsd {
    use super::*;
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    terms!("http://www.w3.org/2001/XMLSchema#";
        string / STRING = "string",
        integer / INTEGER = "integer",
        decimal / DECIMAL = "decimal",
    );
}

pub mod ontosoc {
    use super::*;
    pub const NS: &str = "http://maroua-univ/ns/ontosoc#";
    /// Ontology header IRI (namespace without the trailing `#`).
    pub const ONTOLOGY: &str = "http://maroua-univ/ns/ontosoc";
    terms!("http://maroua-univ/ns/ontosoc#";
        compatibility_of / COMPATIBILITY_OF = "compatibilityOf",
        accepts_signature_of / ACCEPTS_SIGNATURE_OF = "acceptsSignatureOf",
    );

    pub fn term(local: &str) -> Iri {
        Iri::new_unchecked(&format!("{NS}{local}"))
    }
}

pub mod foaf {
    pub const NS: &str = "http://xmlns.com/foaf/0.1/";
}

pub mod schema_org {
    pub const NS: &str = "https://schema.org/";
}

pub mod wai {
    pub const NS: &str = "http://purl.org/wai#";
}

pub mod dbo {
    pub const NS: &str = "http://dbpedia.org/ontology/";
}

pub const EXAMPLE_NS: &str = "http://example.org/";

/// Prefixes used when serializing schema, alignment and snapshot files.
pub fn standard_prefixes() -> crate::rdf::PrefixMap {
    let mut map = crate::rdf::PrefixMap::new();
    for (label, ns) in [
        ("rdf", rdf::NS),
        ("rdfs", rdfs::NS),
        ("owl", owl::NS),
        ("xsd", xsd::NS),
        ("ontosoc", ontosoc::NS),
        ("foaf", foaf::NS),
        ("schema", schema_org::NS),
        ("wai", wai::NS),
        ("dbo", dbo::NS),
        ("ex", EXAMPLE_NS),
    ] {
        map.insert(label, Iri::new_unchecked(ns))
            .expect("standard prefix labels are unique");
    }
    map
}
