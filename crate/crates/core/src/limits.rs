/// Size guards for the exhaustive enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Bound on `|carrier|^|objects|`, the candidate space of sieve enumeration.
    pub sieve_candidates: u128,
    /// Bound on the total number of candidate sieve families in coverage enumeration.
    pub coverage_candidates: u128,
    /// Largest ring carrier accepted by ideal enumeration.
    pub ring_size: usize,
    /// Bound on generator assignments tried by module hom searches.
    pub hom_candidates: u128,
    /// Largest sample of monomial ideals produced by colon closure.
    pub graded_sample: usize,
}

impl Limits {
    pub const DEFAULT_CAP: u128 = 1_000_000;

    /// Same limits with every candidate-space cap replaced by `cap`.
    pub fn with_cap(cap: u128) -> Self {
        Limits { sieve_candidates: cap, hom_candidates: cap, ..Limits::default() }
    }

    pub(crate) fn guard(what: &'static str, size: u128, cap: u128) -> crate::Result<()> {
        if size > cap {
            Err(crate::Error::TooLarge { what, size, cap })
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            sieve_candidates: Self::DEFAULT_CAP,
            coverage_candidates: 1 << 20,
            ring_size: 256,
            hom_candidates: Self::DEFAULT_CAP,
            graded_sample: 4096,
        }
    }
}
