"""Thresholds, equilibria, and regime classification for three parameter sets.

Walks the analysis layer of the library: derived quantities (gamma, r0, rho,
i_u), the endemic equilibrium with its equation residuals, the stability
regime, and the demographic fate.
"""

from sirsvp import (
    classify_regime,
    derived_quantities,
    endemic_equilibrium,
    population_fate,
    validate_params,
)

SETS = {
    "reference (rho >= 1 certifies)": dict(
        b=1.0, beta=3.0, nu=1 / 3, delta=1.0, p=1 / 3, alpha=1.0, mu0=0.2, k=0.1),
    "boundary (i_u == rho certifies)": dict(
        b=1.0, beta=6.0, nu=0.5, delta=4.0, p=0.5, alpha=1.0, mu0=0.2, k=0.1),
    "high transmission (uncertified)": dict(
        b=1.0, beta=20.0, nu=0.5, delta=4.0, p=0.5, alpha=1.0, mu0=0.2, k=0.1),
    "sub-threshold (disease dies out)": dict(
        b=1.0, beta=1.5, nu=1 / 3, delta=1.0, p=1 / 3, alpha=1.0, mu0=0.2, k=0.1),
}


def main():
    for label, raw in SETS.items():
        params = validate_params(**raw)
        d = derived_quantities(params)
        print(f"== {label}")
        print(f"   gamma = {d.gamma:.6g}   r0 = {d.r0:.6g}   rho = {d.rho:.6g}"
              f"   i_u = {d.i_u if d.i_u is not None else 'undefined'}")

        eq = endemic_equilibrium(params)
        if eq is None:
            print("   no endemic state: the disease-free point (1, 0, 0) attracts")
        else:
            print(f"   endemic state: s_e = {eq.s_e:.6f}, i_e = {eq.i_e:.6f}, "
                  f"r_e = {eq.r_e:.6f}  (residuals {max(eq.residuals):.1e})")

        report = classify_regime(params)
        print(f"   regime: {report.regime.value}  "
              f"[basis: {report.certificate_basis.value}]")

        if eq is not None:
            fate = population_fate(params)
            if fate.n_e is None:
                print(f"   population fate: {fate.fate.value} "
                      f"(gap {fate.threshold_gap:+.4f})")
            else:
                n_star = params.mortality.carrying_capacity(params.b)
                print(f"   population fate: {fate.fate.value} at n_e = {fate.n_e:.5f}"
                      f" (disease-free carrying capacity {n_star:.5f})")
        print()


if __name__ == "__main__":
    main()
