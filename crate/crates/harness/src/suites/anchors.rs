//! The identity or inequality behind each check, as a formula string.
//!
//! Notation: `∇̂` Levi-Civita, `∇ = ∇̂ + K`, `∇̄ = ∇̂ − K`, `A = g(K·,·)`,
//! `E = tr_g K`, `τ = g(E,·)`, `u = ‖A‖²`, `R₀(X,Y)Z = g(Y,Z)X − g(X,Z)Y`.

pub const GENERATOR: &str = "generated structure satisfies its family predicates";
pub const CONVERGENCE: &str = "residual(2h) / residual(h) ∈ [3.2, 4.8]";

pub const EXAMPLE_K: &str =
    "A = e¹e¹e² + 3e²e²e² on R²: K(e₁,e₁) = e₂, K(e₁,e₂) = e₁, K(e₂,e₂) = 3e₂";
pub const EXAMPLE_EIGHTH: &str =
    "A = e¹e¹e² + 3e²e²e², U = e₁: (τ∘K)(U,U) − g(K_U,K_U) = ⅛‖τ‖² = 2";
pub const EXAMPLE_N2OVER3: &str = "A = e¹e¹e² + 3e²e²e²: (n+2)/3·‖A‖² = ‖E‖²";
pub const EXAMPLE_CERTIFICATE: &str =
    "equality frame: A_iii = 3A_jji, A_ijr = 0 for distinct i, j, r";

pub const RIC_K: &str = "Ric^K(Y,Z) = τ(K(Y,Z)) − g(K_Y,K_Z) = tr(X ↦ [K_X,K_Y]Z)";
pub const RHO_K: &str = "ρ^K = tr_g Ric^K = ‖E‖² − ‖K‖²";
pub const QUARTER: &str = "(τ∘K)(U,U) − g(K_U,K_U) ≤ ¼‖τ‖²g(U,U)";
pub const EIGHTH: &str = "A(U,U,U) = 0 ⇒ (τ∘K)(U,U) − g(K_U,K_U) ≤ ⅛‖τ‖²g(U,U)";
pub const N2OVER3: &str = "‖E‖² ≤ (n+2)/3·‖A‖²";
pub const LPQ_PAIRING: &str = "E = 0 ⇒ ‖L‖² + ‖P‖² = −g(Q,A)";
pub const LPQ_CALABI: &str = "E = 0 ⇒ ‖L‖² + ‖P‖² ≥ (n+1)/(n(n−1))·u²";
pub const LPQ_LI: &str = "E = 0 ⇒ ‖L‖² + ‖P‖² ≤ (3/2)·u²";
pub const LPQ_N2: &str = "n = 2, E = 0 ⇒ ‖L‖² + ‖P‖² = (3/2)·u²";
pub const RIC_K_TRACE_FREE: &str = "E = 0 ⇒ Ric^K = −g(K·,K·) ≤ 0";
pub const SCALAR_GAP: &str = "ρ̂ − ρ = ‖A‖² − ‖E‖² ≥ max(−(n−1)/3·‖A‖², −(n−1)/(n+2)·‖E‖²)";
pub const SECTIONAL_K: &str = "k^K(π) = g([K,K](e₁,e₂)e₂, e₁) depends only on the plane π";
pub const FRAME_INVARIANCE: &str = "g(t,s) equals the Euclidean pairing of frame components";
pub const RAISE_LOWER: &str = "lowering the raised index of A returns A";
pub const BRACKET_SYMMETRIES: &str =
    "[K,K] and R₀ are antisymmetric in (X,Y), (Z,W) and satisfy Bianchi";
pub const TRACE_FREE_PROJECTION: &str = "A − (3/(n+2))·sym(τ ⊗ g) is trace-free";

pub const METRICITY: &str = "∇̂g = 0";
pub const TORSION: &str = "Γ̂ᵏᵢⱼ = Γ̂ᵏⱼᵢ";
pub const HESSIAN_FLAT: &str = "A = −½D³φ, g = D²φ ⇒ R = 0";
pub const G3_CONSTANT: &str = "R = [K,K] = −2(a²+b²)·R₀ on the flat torus";
pub const CONJUGATE_SYMMETRIC: &str = "∇̂A totally symmetric (R = R̄)";
pub const SECTIONAL_SUM: &str = "½(k + k̄)(π) = k̂(π) + k^K(π)";

pub const CALABI_EQUALITY: &str = "R = HR₀, E = 0, ∇̂A = 0, n = 2 ⇒ u = n(n−1)(−H)";
pub const PARALLEL_BAND: &str = "∇̂A = 0 ⇒ u ∈ [⅔(n+1)(−H), n(n−1)(−H)]";
pub const INF_DICHOTOMY: &str =
    "inf u ≥ ((n+1)(−H) + √((n+1)²H² − 6N₂))/3 or inf u ≤ ((n+1)(−H) − √(…))/3";
pub const SUP_INTERVAL: &str = "sup u ∈ [(n(n−1)(−H) ∓ √(n²(n−1)²H² − 4N₄))/2]";
pub const SURFACE_BOUNDS: &str = "n = 2: sup u ∈ [−H₂ ∓ √(H₂² − ⅔ inf û)]";
pub const NABLA_BOUND_N2: &str = "n = 2: n(n²−1)H²/4 = (3/2)H²";
pub const SURFACE_THRESHOLD: &str = "inf û = (3/2)H₂² ⇒ sup u interval is the single point −H₂";
pub const DICHOTOMY_BOUNDARY: &str = "N₂ = H²(n+1)²/6 ⇒ both branches equal (n+1)(−H)/3";
pub const SUP_BOUNDARY: &str = "inf ‖∇̂A‖² = n(n²−1)H²/4 ⇒ sup u interval is a single point";
pub const CALABI_BAND: &str = "upper end of the ∇̂A = 0 band equals n(n−1)(−H)";
pub const MAX_PROBE: &str = "f attains its maximum at x ⇒ Δf(x) ≤ 0";

pub const FIBER: &str = "(n+k−2)∫ s(V,…,V) = Σ_{j≠i₀} ∫ tr_{(i₀,j)} s(V,…,V) over S^{n−1}";
pub const FIBER_MC: &str =
    "product-Gauss sphere integral agrees with Monte Carlo within 5 standard errors";
pub const CODIFF: &str = "δα = −(n+k−2)s(V,…,V) + Σ_{j≠i₀} tr_{(i₀,j)} s(V,…,V) on S^{n−1}";
pub const CODIFF_INTEGRAL: &str = "∫_{S^{n−1}} δα = 0";
pub const ROS: &str = "∫_{UM} tr_g(∇̂s)(·,·,V,…,V) = 0 on a compact M";
pub const ROS_SHRINK: &str = "Ros residual shrinks ≥ 4× when h halves and the lattice doubles";
pub const ROS_CUBIC: &str = "∫_{UM} ‖(∇̂K)(V,V,V)‖² + 3∫_{UM} g(R̂(K(V,V),V)V, K(V,V)) = 0";
pub const ROS_CUBIC_FULL: &str =
    "the same sum plus ∫_{UM} ∇̂²τ(V,V,V)·A(V,V,V) vanishes without ∇̂τ = 0";

/// Anchor of a residual or gap id reported by the core crate.
pub fn of(id: &str) -> &'static str {
    match id {
        "conjugate-connection" => "g(∇̄_X Y, Z) = X g(Y,Z) − g(Y, ∇_X Z)",
        "duality-involution" => "the conjugate of ∇̄ is ∇",
        "curvature-duality" => "g(R(X,Y)Z, W) = −g(Z, R̄(X,Y)W)",
        "curvature-decomposition" => "R(X,Y) = R̂(X,Y) + (∇̂_X K)_Y − (∇̂_Y K)_X + [K_X,K_Y]",
        "curvature-sum" => "R + R̄ = 2R̂ + 2[K,K]",
        "conjugate-symmetric-curvature" => "∇̂A symmetric ⇒ R = R̂ + [K,K]",
        "ricci-decomposition" => "Ric = Riĉ + div_g ∇̂K − ∇̂τ + Ric^K",
        "ricci-sum" => "Ric + R̄ic = 2Riĉ + 2τ∘K − 2g(K·,K·)",
        "scalar-curvature" => "ρ̂ = ρ + ‖A‖² − ‖E‖²",
        "tau-hessian" => "∇τ = ∇̂τ − τ∘K",
        "tau-hessian-trace" => "tr_g ∇τ = δτ − ‖τ‖²",
        "hessian-ricci" => "R = 0 ⇒ Riĉ = g(K·,K·) − τ∘K",
        "ricci-chain" => "2Riĉ − Ric − R̄ic + ½‖τ‖²g ≥ 0",
        "trace-free-ricci-chain" => "E = 0 ⇒ 2Riĉ − Ric − R̄ic ≥ 0",
        "simons" => "½Δ‖s‖² = g(tr_g ∇̂²s, s) + ‖∇̂s‖²",
        "ricci-identity" => "∇̂²s(X,Y,…) − ∇̂²s(Y,X,…) = −Σ s(…, R̂(X,Y)·, …)",
        "weitzenbock" => "tr_g ∇̂²τ = (dδ + δd)τ + Riĉ(·, E)",
        "weitzenbock-norm" => "½Δ‖τ‖² = g((dδ + δd)τ, τ) + Riĉ(E,E) + ‖∇̂τ‖²",
        "sym2-simons" => "½Δ‖β‖² = ‖∇̂β‖² + g(tr ∇̂²β, β) + Σ_{i<k} k̂(eᵢ∧e_k)(λᵢ − λ_k)²",
        "cubic-simons" => "½Δu = ‖∇̂A‖² + g(∇̂²τ, A) − g([K,K], R̂) + g(Riĉ, g(K·,K·))",
        "cubic-simons-curvature" => "½Δu = ‖∇̂A‖² + g(∇̂²τ, A) + ‖R̂‖² − g(R, R̂) + g(Riĉ, g(K·,K·))",
        "cubic-simons-ricci" => {
            "½Δu = ‖∇̂A‖² + g(∇̂²τ, A) + ‖R̂‖² + ‖Riĉ‖² − g(R, R̂) − g(Ric, Riĉ) + g(Riĉ, τ∘K)"
        }
        "bracket-constant-curvature" => {
            "[K,K] = κR₀ ⇒ ½Δu = ‖∇̂A‖² + g(∇̂²τ, A) − 2κρ̂ + g(Riĉ, g(K·,K·))"
        }
        "trace-free" => "E = 0 ⇒ ½Δu = ‖∇̂A‖² + ‖R̂‖² + ‖Riĉ‖² − g(R, R̂) − g(Ric, Riĉ)",
        "trace-free-constant-curvature" => "E = 0, R = HR₀ ⇒ ½Δu = ‖∇̂A‖² + ‖R̂‖² + ‖Riĉ‖² − (n+1)Hρ̂",
        "parallel-tau-constant-curvature" => {
            "∇̂τ = 0, R = HR₀ ⇒ ½Δu = ‖∇̂A‖² + ‖R̂‖² − 2Hρ̂ + g(Riĉ, g(K·,K·))"
        }
        "lagrangian" => "R̂ − [K,K] = cR₀ ⇒ ½Δu = ‖∇̂A‖² + g(∇̂²τ, A) − ‖R̂‖² + 2cρ̂ + g(Riĉ, g(K·,K·))",
        "hat-constant-curvature" => "R̂ = k̂R₀ ⇒ ½Δu = ‖∇̂A‖² + g(∇̂²τ, A) + k̂(2(u − ‖E‖²) + (n−1)u)",
        "hat-constant-curvature-lower" => "R̂ = k̂R₀, k̂ ≥ 0 ⇒ ½Δu ≥ ‖∇̂A‖² + g(∇̂²τ, A) + (n−1)/3·k̂u",
        "simons-sandwich-lower" => "E = 0, R = HR₀ ⇒ ½Δu ≥ (n+1)Hu + (n+1)/(n(n−1))·u² + ‖∇̂A‖²",
        "simons-sandwich-upper" => "E = 0, R = HR₀ ⇒ ½Δu ≤ (n+1)Hu + (3/2)u² + ‖∇̂A‖²",
        "sectional-sum" => SECTIONAL_SUM,
        other => panic!("no anchor for check `{other}`"),
    }
}
