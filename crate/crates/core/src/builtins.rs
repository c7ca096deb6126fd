//! Names of built-in functions, shared by the checker and the evaluator.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Abs,
    Floor,
    Ceiling,
    Min,
    Max,
    Each,
    Filter,
    Reduce,
    Power,
    List,
    Bag,
    Set,
    IsPrime,
    LookupSequence,
    ExtendSequence,
}

impl Builtin {
    pub const ALL: [Builtin; 15] = [
        Builtin::Abs,
        Builtin::Floor,
        Builtin::Ceiling,
        Builtin::Min,
        Builtin::Max,
        Builtin::Each,
        Builtin::Filter,
        Builtin::Reduce,
        Builtin::Power,
        Builtin::List,
        Builtin::Bag,
        Builtin::Set,
        Builtin::IsPrime,
        Builtin::LookupSequence,
        Builtin::ExtendSequence,
    ];

    pub fn name(self) -> &'static str {
        use Builtin::*;
        match self {
            Abs => "abs",
            Floor => "floor",
            Ceiling => "ceiling",
            Min => "min",
            Max => "max",
            Each => "each",
            Filter => "filter",
            Reduce => "reduce",
            Power => "power",
            List => "list",
            Bag => "bag",
            Set => "set",
            IsPrime => "isPrime",
            LookupSequence => "lookupSequence",
            ExtendSequence => "extendSequence",
        }
    }

    /// The module that must be imported before the builtin is visible.
    pub fn module(self) -> Option<&'static str> {
        match self {
            Builtin::LookupSequence | Builtin::ExtendSequence => Some("oeis"),
            _ => None,
        }
    }

    pub fn lookup(name: &str, imports: &[String]) -> Option<Builtin> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name && b.module().is_none_or(|m| imports.iter().any(|i| i == m)))
    }
}

/// Modules that `import` accepts.
pub const KNOWN_MODULES: &[&str] = &["oeis"];
