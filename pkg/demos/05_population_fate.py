"""Demography under endemic disease: regulation below capacity, or collapse.

With the epidemic fractions pinned at the endemic state, the population obeys
n' = (b - mu(n) - delta*i_e) n.  If births still outrun deaths at n = 0 the
population settles at the regulated size n_e = mu^-1(b - delta*i_e), strictly
below the disease-free carrying capacity; otherwise it declines to extinction.
Both outcomes are produced here with the same epidemic constants by moving
only the baseline mortality.
"""

from sirsvp import (
    Fate,
    IntegrationSpec,
    SystemKind,
    TerminalKind,
    endemic_equilibrium,
    integrate,
    population_fate,
    validate_params,
)

EPIDEMIC = dict(b=1.0, beta=3.0, nu=1 / 3, delta=1.0, p=1 / 3, alpha=1.0, k=0.1)


def main():
    for mu0 in (0.2, 0.7):
        params = validate_params(**EPIDEMIC, mu0=mu0)
        eq = endemic_equilibrium(params)
        fate = population_fate(params)
        n_star = params.mortality.carrying_capacity(params.b)
        print(f"== baseline mortality mu0 = {mu0}")
        print(f"   endemic infectious fraction i_e = {eq.i_e:.6f}")
        print(f"   threshold gap b - delta*i_e - mu(0) = {fate.threshold_gap:+.4f} "
              f"-> {fate.fate.value}")

        traj = integrate(
            IntegrationSpec(SystemKind.FULL, (3.0, 1.0, 1.0, 5.0), 1000.0), params)
        n = traj.column("n")
        if fate.fate is Fate.REGULATION:
            print(f"   disease-free capacity n* = {n_star:.4f}; regulated size "
                  f"n_e = {fate.n_e:.4f}")
            print(f"   simulated n(1000) = {n[-1]:.8f} "
                  f"(|n - n_e| = {abs(n[-1] - fate.n_e):.1e})")
        else:
            assert traj.terminal.kind is TerminalKind.EXTINCTION_THRESHOLD
            print(f"   population fell below 1e-6 of n* at t = "
                  f"{traj.terminal.time:.1f} (n = {n[-1]:.2e})")
        print()


if __name__ == "__main__":
    main()
