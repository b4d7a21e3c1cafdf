use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Plane {
    /// Defined over the solutions of the whole instance.
    Semantic,
    /// Defined over the constraints around a variable.
    Syntactic,
}

macro_rules! concepts {
    ($($variant:ident => $name:literal, $plane:ident, $preserving:literal, $about:literal;)*) => {
        /// The interchangeability and substitutability relations of the taxonomy.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Concept {
            $($variant,)*
        }

        impl Concept {
            pub const ALL: &'static [Concept] = &[$(Concept::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Concept::$variant => $name,)*
                }
            }

            pub fn plane(self) -> Plane {
                match self {
                    $(Concept::$variant => Plane::$plane,)*
                }
            }

            /// Whether removing the dominated (or duplicate) value of a related
            /// pair can never make a solvable instance unsolvable.
            pub fn sat_preserving(self) -> bool {
                match self {
                    $(Concept::$variant => $preserving,)*
                }
            }

            pub fn description(self) -> &'static str {
                match self {
                    $(Concept::$variant => $about,)*
                }
            }
        }
    };
}

concepts! {
    Fi => "FI", Semantic, true, "full interchangeability";
    Ki => "KI", Semantic, true, "k-interchangeability";
    Ni => "NI", Syntactic, true, "neighborhood interchangeability";
    Spri => "SPrI", Semantic, false, "subproblem interchangeability";
    Pi => "PI", Semantic, true, "partial interchangeability";
    Npi => "NPI", Syntactic, false, "neighborhood partial interchangeability";
    Diri => "DirI", Syntactic, false, "directional interchangeability";
    Dirsub => "DirSub", Syntactic, false, "directional substitutability";
    Nic => "NI_C", Syntactic, false, "per-constraint neighborhood interchangeability";
    Nsubc => "NSub_C", Syntactic, false, "per-constraint neighborhood substitutability";
    Sub => "Sub", Semantic, true, "substitutability";
    Nsub => "NSub", Syntactic, true, "neighborhood substitutability";
    Dynni => "DynNI", Syntactic, false, "dynamic neighborhood interchangeability";
    Fdyni => "FDynI", Semantic, true, "full dynamic interchangeability";
    Fdynsub => "FDynSub", Semantic, true, "full dynamic substitutability";
    Coni => "ConI", Semantic, false, "conditional interchangeability";
    Conni => "ConNI", Syntactic, false, "conditional neighborhood interchangeability";
    Consub => "ConSub", Semantic, false, "conditional substitutability";
    Connsub => "ConNSub", Syntactic, false, "conditional neighborhood substitutability";
    Nti => "NTI", Syntactic, true, "neighborhood tuple interchangeability";
    Forwni => "ForwNI", Syntactic, true, "forward neighborhood interchangeability";
    Tupsub => "TupSub", Semantic, true, "tuple substitutability";
    Ctxdepi => "CtxDepI", Semantic, true, "context-dependent interchangeability";
    Gnsub => "GNSub", Syntactic, false, "generalized neighborhood substitutability";
}

impl Concept {
    /// Substitutability relations are directional: `(a, b)` reads
    /// "a substitutable for b".
    pub fn is_directional(self) -> bool {
        matches!(
            self,
            Concept::Sub
                | Concept::Nsub
                | Concept::Dirsub
                | Concept::Nsubc
                | Concept::Fdynsub
                | Concept::Consub
                | Concept::Connsub
                | Concept::Tupsub
        )
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown concept `{0}`")]
pub struct UnknownConcept(pub String);

impl FromStr for Concept {
    type Err = UnknownConcept;

    /// Case-insensitive; underscores and dashes are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = |x: &str| {
            x.chars()
                .filter(|c| *c != '_' && *c != '-')
                .collect::<String>()
                .to_lowercase()
        };
        let key = norm(s);
        Concept::ALL
            .iter()
            .copied()
            .find(|c| norm(c.name()) == key)
            .ok_or_else(|| UnknownConcept(s.to_string()))
    }
}
