//! Definitions and predicted scalings of the reported quantities.
//!
//! Notation: `T = ∫₀ᵗ e^{(t−τ)Δ}(v⊗v)dτ` with `v = e^{τΔ}u⁰`, split as
//! `T = E(t)Π⁰ + T̃` where `Π⁰ = u⁰⊗u⁰` and `E(t) = Δ^{-1}(e^{tΔ}−1)`;
//! `ũ₂ = u⁰₁ + u⁰₂`; `agg` is the `ℓ^q` aggregate of `2^{-j}‖Δ_j·‖_∞`
//! over the observed shells `ℕ_k`.

use crate::CliError;

pub struct Entry {
    pub name: &'static str,
    /// `"3D"`, `"2D"` or `"any"`.
    pub dim: &'static str,
    pub formula: &'static str,
    pub scaling: &'static str,
}

const fn e(
    name: &'static str,
    dim: &'static str,
    formula: &'static str,
    scaling: &'static str,
) -> Entry {
    Entry {
        name,
        dim,
        formula,
        scaling,
    }
}

pub const ENTRIES: &[Entry] = &[
    e("S", "3D", "agg of the first component of the second iterate -2Pdiv T", "S >~ eps^3 k^(1/q)"),
    e("S", "2D", "agg of the first component of the second iterate -2Pdiv T", "S >~ eta k^(1/q)"),
    e("A1", "3D", "agg(d1 T11 + d2 T12), the part of Pdiv T without the Riesz term", "A1 >~ eta eps k^(1/q)"),
    e("A2", "3D", "agg(d1 Delta^-1 d_a d_b T_ab), the Riesz part, a,b in {1,2}", "A2 <~ eta eps^2 k^(1/q)"),
    e("A11", "3D", "agg(d1 E(t)Pi0_11 + d2 E(t)Pi0_12), the frozen-data part of A1", "A11 >~ eta eps k^(1/q)"),
    e("A12", "3D", "agg(d1 T~11 + d2 T~12), the heat-flow correction of A1", "A12 <~ eta^2 k^(1/q)"),
    e("main", "3D", "t agg((d1 - d2)(u1 u1)), the leading term of A11", "main ~ eta eps k^(1/q)"),
    e("main", "2D", "t agg(d2(u1 u1)), the leading term of Q", "main ~ eta k^(1/q)"),
    e("correction", "3D", "t agg(d2(u1 u~2)), the cross term left after extracting main", "correction <~ eta eps k^(1+1/q) 2^(-k/2)"),
    e("series", "3D", "sum over r >= 2 of the Taylor terms of E(t) applied to d1 Pi0_11 + d2 Pi0_12", "series <~ eta^2 k^(1/q) 2^(-k)"),
    e("series", "2D", "sum over r >= 2 of the Taylor terms of E(t) applied to i(xi1^2 - xi2^2)xi2/|xi|^2 (u1 u1)", "series <~ eta k^(1/q) 2^(-k)"),
    e("A21", "3D", "frozen-data part of A2: agg of R_ab d1 E(t)Pi0_ab", "A21 <~ eta eps^2 k^(1/q)"),
    e("A22", "3D", "heat-flow part of A2: agg of R_ab d1 T~_ab", "A22 <~ eta^2 k^(1/q)"),
    e("A211_11", "3D", "t agg(R_11 d1 Pi0_11)", "A211_11 <~ eta eps^2 k^(1/q)"),
    e("A211_12", "3D", "t agg(R_12 d1 Pi0_12)", "A211_12 <~ eta eps^2 k^(1/q)"),
    e("A211_22", "3D", "t agg(R_22 d1 Pi0_22)", "A211_22 <~ eta eps^2 k^(1/q)"),
    e("A212", "3D", "Taylor remainder (r >= 2) of the Riesz part, including R", "A212 <~ eta^2 k^(1/q) 2^(-k)"),
    e("B1", "3D", "t agg(i xi1^3/|xi|^2 U51), diagonal interactions l = m", "B1 <~ eta eps^2 k^(1/q)"),
    e("B2", "3D", "t agg(i xi1^3/|xi|^2 U52), off-diagonal interactions l != m", "B2 <~ eta k 2^(-k)"),
    e("I", "3D", "t agg(i xi1 xi2^2/|xi|^2 (u1 u1))", "I <~ eta eps^2 k^(1/q)"),
    e("II", "3D", "2t agg(i xi1 xi2^2/|xi|^2 (u1 u~2))", "II <~ eta eps k^(1+1/q) 2^(-k/2)"),
    e("III", "3D", "t agg(i xi1 xi2^2/|xi|^2 (u~2 u~2))", "III <~ eta eps k^(2+1/q) 2^(-k)"),
    e("R~", "2D", "agg of the first component of Pdiv T~, the heat-flow correction", "R~ <~ eta^2 k^(1/q)"),
    e("Q", "2D", "agg of the first component of Pdiv E(t)Pi0", "Q >~ eta k^(1/q)"),
    e("Q~", "2D", "agg of E(t) applied to Q~_d2 + Q~_M + Q~_R, the part of Q beyond main and cross", "Q~ <~ eta k^(1/q) 2^(-k/2)"),
    e("Q~_d2", "2D", "agg(E(t) d2(u1 u~2))", "Q~_d2 <~ eta k^(1/q) 2^(-k/2)"),
    e("Q~_M", "2D", "agg(E(t) i xi1 xi2^2/|xi|^2 (2 u1 u~2 - u~2 u~2))", "Q~_M <~ eta k^(1/q) 2^(-k/2)"),
    e("Q~_R", "2D", "agg(-2 E(t) i xi1^2 xi2/|xi|^2 (u1 u~2))", "Q~_R <~ eta k^(1/q) 2^(-k/2)"),
    e("cross", "2D", "t agg(i xi1^2 xi2/|xi|^2 (u1 u1))", "cross <~ eta eps^2 k^(1/q)"),
    e("U1", "any", "pairs with lambda = lambda' = +, mu = mu': output carrier near 2c_k", "Delta_j U1 = 0 for j in N_k"),
    e("U2", "any", "pairs with lambda = lambda' = -, mu = mu': output carrier near -2c_k", "Delta_j U2 = 0 for j in N_k"),
    e("U3", "any", "pairs with lambda = lambda', mu != mu': output carrier near +-2c_k", "Delta_j U3 = 0 for j in N_k"),
    e("U4", "any", "pairs with lambda != lambda', mu != mu': output carrier mu(b_l - b_m), below the observed shells", "Delta_j U4 = 0 for j in N_k"),
    e("U51", "any", "pairs with lambda != lambda', mu = mu', l = m: output carrier +-2b_l = +-a_l", "only U5 survives Delta_j, j in N_k; U51 carries the signal"),
    e("U52", "any", "pairs with lambda != lambda', mu = mu', l != m: output carrier +-(b_l + b_m)", "U52 is the off-diagonal remainder, t agg <~ eta k 2^(-k)"),
    e("U5", "any", "U51 + U52, the interactions that reach the observed shells", "Delta_j(u1 u1) = Delta_j U5 for j in N_k"),
];

pub fn names() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = Vec::new();
    for entry in ENTRIES {
        if !v.contains(&entry.name) {
            v.push(entry.name);
        }
    }
    v
}

pub fn explain(name: &str) -> Result<String, CliError> {
    let hits: Vec<&Entry> = ENTRIES.iter().filter(|e| e.name == name).collect();
    if hits.is_empty() {
        return Err(CliError::Config(format!(
            "unknown quantity {name:?}; known: {}",
            names().join(", ")
        )));
    }
    let mut out = String::new();
    for h in hits {
        let tag = if h.dim == "any" {
            String::new()
        } else {
            format!(" [{}]", h.dim)
        };
        out.push_str(&format!(
            "{}{}\n  definition: {}\n  predicted:  {}\n",
            h.name, tag, h.formula, h.scaling
        ));
    }
    Ok(out)
}
