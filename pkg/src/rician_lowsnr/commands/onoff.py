"""On-off scheme at one SNR: policy, rates, tail approximations, optional simulation."""

from rician_lowsnr import config, io
from rician_lowsnr.channel import ChannelSpec, RandomStream
from rician_lowsnr.exact import capacity_exact
from rician_lowsnr.onoff import (
    ThresholdSource,
    average_power_identity,
    build_policy,
    ccdf_approx_chain,
    rate,
    rate_lower_bound,
    simulate_throughput_parallel,
    vanishing_ratio,
)
from rician_lowsnr.specfun import DEFAULT_CONFIG, db_to_linear
from rician_lowsnr.ui import console, err_console, key_value_table, print_banner


def cmd_onoff(
    spec: ChannelSpec,
    snr_db: float,
    source: str = ThresholdSource.EXACT_LAMBDA.value,
    mc_samples: int = 0,
    seed: int = config.DEFAULT_SEED,
    cfg=DEFAULT_CONFIG,
) -> dict:
    snr = db_to_linear(snr_db)
    policy = build_policy(spec, snr, threshold_source=source, cfg=cfg)
    r = rate(spec, policy, cfg)
    capacity = capacity_exact(spec, snr, cfg).capacity_nats
    chain = ccdf_approx_chain(spec, policy.threshold)
    report = {
        "spec": spec.label(),
        "snr_db": snr_db,
        "snr_linear": snr,
        "threshold_source": policy.source.value,
        "threshold": policy.threshold,
        "on_power": policy.on_power,
        "ccdf": policy.ccdf,
        "average_power": average_power_identity(spec, policy, cfg),
        "rate": r,
        "rate_lower_bound": rate_lower_bound(spec, policy),
        "capacity_exact": capacity,
        "rate_over_capacity": r / capacity if capacity > 0 else None,
        "ccdf_rayleigh_form": chain.rayleigh_form,
        "ccdf_gamma_form": chain.gamma_form,
        "ccdf_tail_form": chain.tail_form,
        "vanishing_ratio": vanishing_ratio(spec, policy.threshold),
    }
    if mc_samples:
        est = simulate_throughput_parallel(spec, policy, RandomStream(seed, 0), mc_samples)
        report.update({
            "mc_slots": est.n_slots,
            "mc_rate": est.rate_estimate,
            "mc_rate_stderr": est.stderr,
            "mc_active_fraction": est.active_fraction,
            "mc_average_power": est.power_estimate,
            "mc_average_power_stderr": est.power_stderr,
        })
    return report


def run_onoff(spec, snr_db, source, mc_samples, seed, fmt=None, out=None) -> int:
    report = cmd_onoff(spec, snr_db, source=source, mc_samples=mc_samples, seed=seed)
    path = None
    if fmt == "json":
        path = io.write_report(report, out, f"onoff {spec.label()}")
    target = err_console if fmt == "json" and path is None else console
    print_banner(target)
    rows = [(key.replace("_", " "), value) for key, value in report.items() if key not in ("spec", "snr_db")]
    target.print(key_value_table(f"On-off power control, {spec.label()}, SNR {snr_db:g} dB", rows))
    if path is not None:
        target.print(f"  [success]✓ Saved:[/success] {path}")
    return config.EXIT_OK
