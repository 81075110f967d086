use super::Name;

/// Primes `base` until `taken` rejects the candidate: `x`, `x'`, `x''`, ...
///
/// The prime count only grows, so the result depends on nothing but `base`
/// and `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let mut candidate = format!("{base}'");
    while taken(&candidate) {
        candidate.push('\'');
    }
    candidate
}
