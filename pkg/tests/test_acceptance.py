"""Acceptance criteria, one test each; the terminal summary lists one line per criterion."""
import itertools
import math

import numpy as np
import pytest
from scipy import integrate, stats

from leofso.experiments import case_params, matrix_at, state_averaged_stats
from leofso.fading import cov_ha2_hp, sample_fading
from leofso.linkbudget import LinkConfig
from leofso.outage import outage_state_closed, outage_state_numeric
from leofso.specfun import reg_lower_gamma, upper_gamma_ext
from leofso.turbulence import KernelContext, aoa_kernel, kernel_asymptotic_coeff, scint_kernel
from leofso.validation import eta_checks, mc_checks, outage_checks, stats_checks


def _summarize(checks):
    failed = [c for c in checks if not c.passed and not c.soft]
    soft = [c for c in checks if not c.passed and c.soft]
    parts = [f"{len(checks) - len(failed) - len(soft)}/{len(checks)} checks pass"]
    for c in failed:
        parts.append(f"FAILED {c.name}: got {c.computed if c.computed is not None else '-'}"
                     f" ref {c.reference if c.reference is not None else '-'} tol {c.tolerance} {c.note}".rstrip())
    for c in soft:
        parts.append(f"soft {c.name}: {c.computed}")
    return not failed, "; ".join(parts)


def test_criterion_01_stats_at_25deg(cfg, report):
    checks = stats_checks(cfg)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(1, ok, "second-order stats at 25 deg within 2%: " + detail)


def _outage_group(cfg, calibration, criterion):
    return [c for c in outage_checks(cfg, calibration) if c.criterion == criterion]


def test_criterion_02_outage_at_25deg(cfg, calibration, report):
    checks = _outage_group(cfg, calibration, 2)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(2, ok, "outage at 25 deg (baseline 1e-6, cases 3%): " + detail)


def test_criterion_03_outage_at_30deg(cfg, calibration, report):
    checks = _outage_group(cfg, calibration, 3)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(3, ok, "outage at 30 deg within 5%: " + detail)


def test_criterion_04_ordering_reversal(cfg, calibration, report):
    checks = _outage_group(cfg, calibration, 4)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(4, ok, "40 deg values within 5%, BL > FA at 40 deg, FA > BL at 30 deg: " + detail)


@pytest.mark.slow
def test_criterion_05_monte_carlo_agreement(cfg, calibration, report):
    checks = mc_checks(cfg, calibration)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(5, ok, f"MC n={cfg.mc.n} seed={cfg.mc.seed}, max rel err <= 5% and |z| <= 3: " + detail)


def test_criterion_06_eta_sweep_claims(cfg, calibration, report):
    checks = eta_checks(cfg, calibration)
    for c in checks:
        print(c.line())
    ok, detail = _summarize(checks)
    assert report(6, ok, "eta_tt sweep orderings (baseline crossing is soft): " + detail)


def test_criterion_07_closed_form_vs_quadrature(report):
    ms = [0.5, 1.0, 2.0, 5.0, 7.87, 10.9, 14.0, 19.65, 28.0, 50.0]
    qs = [0.3, 1.0, 2.5, 9.6, 13.4, 17.0, 30.0, 50.0]
    nus = [1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 3.0]
    worst, where = 0.0, None
    count = 0
    for m, nu in itertools.product(ms, nus):
        for q in qs + [m]:
            ref = outage_state_numeric(m, q, nu)
            got = outage_state_closed(m, q, nu)
            if ref == 0.0:
                err = 0.0 if got < 1e-300 else math.inf
            else:
                err = abs(got - ref) / ref
            count += 1
            if err > worst:
                worst, where = err, (m, q, nu)
    ok = worst <= 1e-8
    assert report(7, ok, f"closed form vs quadrature on {count} (m, q, nu) points incl. m = q: "
                         f"max rel err {worst:.2e} at {where} (tol 1e-8)")


def test_criterion_08_integration_by_parts_identities(report):
    worst_boundary = worst_tail = 0.0
    for m, q, nu in [(19.65, 16.95, 0.5), (7.87, 13.36, 0.4), (5.0, 5.0, 0.3), (3.0, 0.5, 0.1), (40.0, 12.0, 0.8)]:
        x = m * nu
        z_far = x * 10.0 ** (20.0 / q)
        boundary = (-(x ** q) * reg_lower_gamma(m, z_far) * z_far ** (-q)) - (-(x ** q) * reg_lower_gamma(m, x) * x ** (-q))
        worst_boundary = max(worst_boundary, abs(boundary - reg_lower_gamma(m, x)) / reg_lower_gamma(m, x))
        tail = sum(integrate.quad(lambda z: z ** (m - q - 1) * math.exp(-z), a, b, epsabs=0, epsrel=5e-14, limit=200)[0]
                   for a, b in ((x, x + 1), (x + 1, x + 10), (x + 10, np.inf)))
        worst_tail = max(worst_tail, abs(upper_gamma_ext(m - q, x) - tail) / tail)
    rng = np.random.default_rng(8)
    worst_rec = 0.0
    for a, x in zip(rng.uniform(-20, 20, 2000), np.exp(rng.uniform(math.log(0.01), math.log(100), 2000))):
        lhs = upper_gamma_ext(a + 1.0, x)
        rhs = a * upper_gamma_ext(a, x) + x ** a * math.exp(-x)
        worst_rec = max(worst_rec, abs(lhs - rhs) / abs(lhs))
    ok = worst_boundary <= 1e-12 and worst_tail <= 1e-12 and worst_rec <= 1e-9
    assert report(8, ok, f"boundary term {worst_boundary:.1e}, tail integral {worst_tail:.1e} (tol 1e-12); "
                         f"shape recurrence over 2000 draws {worst_rec:.1e} (tol 1e-9)")


def test_criterion_09_kernel_asymptotics(report):
    link = LinkConfig()
    h0 = link.ogs_altitude
    worst = 0.0
    zero = True
    const = True
    for deg in (20.0, 25.0, 40.0, 55.0, 70.0, 90.0):
        ctx = KernelContext.from_link(link, math.radians(deg))
        zero &= scint_kernel(ctx, h0) == 0.0
        d = 50.0
        f1 = scint_kernel(ctx, h0 + d) / d ** 2
        f2 = scint_kernel(ctx, h0 + d / 2) / (d / 2) ** 2
        est = (4.0 * f2 - f1) / 3.0
        worst = max(worst, abs(est / kernel_asymptotic_coeff(ctx) - 1.0))
        # the AoA weight takes no altitude argument; it must match its closed form at every elevation
        const &= aoa_kernel(ctx) == pytest.approx(2.91 * link.rx_aperture ** (-1 / 3) / math.sin(ctx.elevation),
                                                  rel=1e-15)
    ok = zero and worst <= 1e-3 and const
    assert report(9, ok, f"K_a(h0)=0: {zero}; Richardson quadratic coefficient max rel dev {worst:.1e} (tol 1e-3); "
                         f"K_beta constant: {const}")


def _ks(sample, cdf):
    x = np.sort(sample)
    f = cdf(x)
    n = x.size
    return max(np.max(np.arange(1, n + 1) / n - f), np.max(f - np.arange(n) / n))


def test_criterion_10_sampler_distribution(cfg, report):
    states, params = case_params(cfg, "fa_dominant", math.radians(25.0))
    n = 1_000_000
    draw = sample_fading(states, params, n, seed=cfg.mc.seed, stream=99)
    scint_cdf = lambda x: sum(p * stats.gamma.cdf(x, a=fp.m, scale=1 / fp.m)  # noqa: E731
                              for p, fp in zip(states.probs, params))
    ang_cdf = lambda u: sum(p * np.clip(u, 0, 1) ** fp.q for p, fp in zip(states.probs, params))  # noqa: E731
    ks_a, ks_p = _ks(draw.h_a, scint_cdf), _ks(draw.h_p, ang_cdf)
    a2 = draw.h_a ** 2
    prod = (a2 - a2.mean()) * (draw.h_p - draw.h_p.mean())
    se = prod.std(ddof=1) / math.sqrt(n)
    analytic = cov_ha2_hp(states, params)
    z = abs(prod.mean() - analytic) / se
    ok = ks_a < 0.002 and ks_p < 0.002 and z <= 3.0 and analytic != 0.0
    assert report(10, ok, f"KS h_a {ks_a:.2e}, KS h_p {ks_p:.2e} (tol 2e-3); Cov(h_a^2, h_p) analytic "
                          f"{analytic:.3e} vs empirical {prod.mean():.3e}, {z:.2f} SE (tol 3)")


def test_criterion_11_pipeline_linearity(cfg, report):
    worst = 0.0
    for deg in (20.0, 25.0, 33.0, 47.0, 90.0):
        eps = math.radians(deg)
        m = matrix_at(cfg, eps)
        for name, states in cfg.cases.items():
            got = state_averaged_stats(cfg, name, eps)
            ref = m @ (np.asarray(states.probs) @ np.asarray(states.scales))
            worst = max(worst, float(np.max(np.abs(got - ref) / np.abs(ref))))
    ok = worst <= 1e-12
    assert report(11, ok, f"state-averaged stats vs M applied to the mean scales: max rel err {worst:.1e} (tol 1e-12)")
