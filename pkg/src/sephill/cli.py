"""Command-line interface.

Subcommands::

    sephill simulate       draw synthetic elliptical data to CSV
    sephill estimate       estimate the extreme value index from a CSV
    sephill hillplot       emit (k, gamma_hat) series for plotting
    sephill verify-bounds  randomized checks of the perturbation envelopes
    sephill experiment     run a full Monte Carlo experiment

Conventions shared by all commands: CSV output is comma-separated with LF
line endings and no quoting; JSON numbers carry 17 significant digits so
round-trips are lossless; every output file is accompanied by a
``<name>.manifest.json`` sidecar recording the resolved configuration, and
JSON payloads embed the same manifest minus the timestamp so identical
invocations produce byte-identical primary outputs.  ``SEPHILL_SEED`` in
the environment supplies the default seed when ``--seed`` is absent.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 numeric
degeneracy, 5 experiment failure cap exceeded.
"""

from __future__ import annotations

import argparse
import datetime
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__, bounds, linalg, montecarlo
from .distributions import (
    EllipticalModel,
    FAMILIES,
    GeneratingVariateSpec,
    RngStream,
    sample_elliptical,
    sample_sphere,
)
from .errors import (
    BetaOutOfRange,
    ConfigError,
    DegenerateSample,
    DimensionMismatch,
    DomainError,
    FailureCapExceeded,
    KOutOfRange,
    LengthMismatch,
    NonFinite,
    NonPositiveDistance,
    NonPositivePivot,
    NonSymmetric,
    NotConverged,
    NotPositiveDefinite,
    SepHillError,
    SingularIterate,
    TooFewValues,
)
from .estimators import (
    SAMPLE_MEAN_COV,
    SPATIAL_MEDIAN_TYLER,
    TRUE_PARAMS,
    LocationScatterEstimate,
    estimate_location_scatter,
    hill_plot,
    mahalanobis_distances,
    order_desc,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_FAILURE_CAP = 5

_CONFIG_ERRORS = (
    ConfigError,
    BetaOutOfRange,
    DomainError,
    KOutOfRange,
    DimensionMismatch,
    LengthMismatch,
    NonFinite,
    TooFewValues,
)
_NUMERIC_ERRORS = (
    DegenerateSample,
    NotConverged,
    SingularIterate,
    NotPositiveDefinite,
    NonSymmetric,
    NonPositivePivot,
    NonPositiveDistance,
)

_METHOD_NAMES = {
    "mean-cov": SAMPLE_MEAN_COV,
    "median-tyler": SPATIAL_MEDIAN_TYLER,
    "true-params": TRUE_PARAMS,
}


# -- serialization helpers -------------------------------------------------


def format_float(x: float) -> str:
    """A float as a JSON number with 17 significant digits."""
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps_json(obj, level: int = 0) -> str:
    """Serialize nested dicts/lists/scalars deterministically.

    Insertion order of dicts is preserved; floats get 17 significant
    digits; NaN and infinities map to null.
    """
    pad = "  " * level
    inner = "  " * (level + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps_json(obj.tolist(), level)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps_json(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def csv_cell(v) -> str:
    """One CSV cell: shortest round-trip form for floats, bare ints."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    # tags must not break the unquoted dialect
    return str(v).replace(",", ";").replace("\n", " ")


def write_csv(stream, rows, header=None) -> None:
    if header is not None:
        stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(csv_cell(v) for v in row) + "\n")


def _write_output(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _write_manifest_sidecar(path: str, manifest: dict) -> None:
    if path == "-":
        return
    stamped = dict(manifest)
    stamped["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path + ".manifest.json", "w", newline="\n") as fh:
        fh.write(dumps_json(stamped) + "\n")


def build_manifest(command: str, config: dict, base_seed: int) -> dict:
    """Manifest embedded in JSON outputs; the timestamp is only added to
    the sidecar copy so primary outputs stay byte-identical across runs."""
    return {
        "command": command,
        "config": config,
        "base_seed": int(base_seed),
        "version": __version__,
    }


# -- input parsing helpers -------------------------------------------------


def resolve_seed(value) -> int:
    """--seed value, falling back to SEPHILL_SEED, then 0."""
    if value is not None:
        return int(value)
    env = os.environ.get("SEPHILL_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(
            f"SEPHILL_SEED must be an integer, got {env!r}"
        ) from None


def parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def load_csv_matrix(path: str) -> np.ndarray:
    """Load a purely numeric CSV as a 2-d float array."""
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"could not parse {path!r} as numeric CSV: {exc}") from None
    if arr.size == 0:
        raise ConfigError(f"{path!r} contains no data rows")
    return np.asarray(arr, dtype=float)


def load_scatter(arg: str, dim: int) -> np.ndarray:
    """Scatter from --sigma: 'identity' or a file of d comma-separated rows.

    Symmetry is validated to 1e-9 (relative to the largest entry) and the
    matrix is then symmetrized by averaging with its transpose.
    """
    if arg == "identity":
        return np.eye(dim)
    mat = load_csv_matrix(arg)
    if mat.shape != (dim, dim):
        raise ConfigError(
            f"--sigma file has shape {mat.shape}, expected {(dim, dim)}"
        )
    scale = max(float(np.max(np.abs(mat))), 1.0)
    if float(np.max(np.abs(mat - mat.T))) > 1e-9 * scale:
        raise ConfigError("--sigma file is not symmetric within 1e-9")
    return 0.5 * (mat + mat.T)


def build_variate(family: str, alpha, nu, dim: int) -> GeneratingVariateSpec:
    if family not in FAMILIES:
        raise ConfigError(f"--family must be one of {FAMILIES}, got {family!r}")
    if family in ("pareto", "frechet"):
        if alpha is None:
            raise ConfigError(f"--alpha is required for the {family} family")
        if not alpha > 0:
            raise ConfigError(f"--alpha must be positive, got {alpha}")
        if family == "pareto":
            return GeneratingVariateSpec.pareto(alpha)
        return GeneratingVariateSpec.frechet(alpha)
    if nu is None:
        raise ConfigError("--nu is required for the t-radial family")
    if not nu > 0:
        raise ConfigError(f"--nu must be positive, got {nu}")
    return GeneratingVariateSpec.t_radial(nu, dim)


def build_model(args, dim: int) -> EllipticalModel:
    variate = build_variate(args.family, args.alpha, args.nu, dim)
    if args.mu is None:
        mu = np.zeros(dim)
    else:
        mu = np.array(parse_float_list(args.mu, "--mu"), dtype=float)
        if mu.shape[0] != dim:
            raise ConfigError(
                f"--mu has {mu.shape[0]} entries, expected --dim = {dim}"
            )
    sigma = load_scatter(args.sigma, dim)
    try:
        return EllipticalModel(mu=mu, sigma=sigma, variate=variate)
    except NotPositiveDefinite as exc:
        raise ConfigError(f"--sigma is not positive definite: {exc}") from exc


# -- subcommands -----------------------------------------------------------


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise ConfigError(f"--n must be at least 1, got {args.n}")
    if args.dim < 1:
        raise ConfigError(f"--dim must be at least 1, got {args.dim}")
    seed = resolve_seed(args.seed)
    model = build_model(args, args.dim)
    stream = RngStream(seed, 0)
    if args.force_radii is not None:
        radii = np.array(parse_float_list(args.force_radii, "--force-radii"))
        if radii.shape[0] != args.n:
            raise ConfigError(
                f"--force-radii gives {radii.shape[0]} values for --n = {args.n}"
            )
        if not np.all(radii > 0):
            raise ConfigError("--force-radii values must be positive")
        directions = sample_sphere(model.dim, stream, size=args.n)
        sample = model.mu + radii[:, None] * (directions @ model.lambda_chol.T)
    else:
        sample, radii = sample_elliptical(model, args.n, stream)

    config = {
        "family": args.family,
        "alpha": args.alpha,
        "nu": args.nu,
        "dim": args.dim,
        "n": args.n,
        "mu": model.mu,
        "sigma": model.sigma,
        "out": args.out,
        "radii_out": args.radii_out,
        "header": bool(args.header),
    }
    manifest = build_manifest("simulate", config, seed)

    header = [f"x{i + 1}" for i in range(model.dim)] if args.header else None
    buf = io.StringIO()
    write_csv(buf, sample, header=header)
    _write_output(args.out, buf.getvalue())
    _write_manifest_sidecar(args.out, manifest)
    if args.radii_out is not None:
        rbuf = io.StringIO()
        write_csv(rbuf, ([float(r)] for r in radii))
        _write_output(args.radii_out, rbuf.getvalue())
        _write_manifest_sidecar(args.radii_out, manifest)
    return EXIT_OK


def _parse_k_values(args, n: int) -> list[int]:
    if (args.k is None) == (args.k_list is None):
        raise ConfigError("exactly one of --k and --k-list is required")
    ks = [args.k] if args.k is not None else parse_int_list(args.k_list, "--k-list")
    for k in ks:
        if not 1 <= k <= n - 1:
            raise ConfigError(f"k must satisfy 1 <= k <= n - 1 = {n - 1}, got {k}")
    return ks


def _location_scatter_from_args(args, data: np.ndarray):
    """Either the user-supplied (mu, sigma) or an estimate from the data.

    Returns ``(estimate, method_name, warning_messages)``.
    """
    n, d = data.shape
    if (args.mu is None) != (args.sigma is None):
        raise ConfigError("--mu and --sigma must be given together or not at all")
    if args.mu is not None:
        mu = np.array(parse_float_list(args.mu, "--mu"), dtype=float)
        if mu.shape[0] != d:
            raise ConfigError(f"--mu has {mu.shape[0]} entries, data has {d} columns")
        sigma = load_scatter(args.sigma, d)
        loc = LocationScatterEstimate(
            mu_hat=mu,
            sigma_hat=sigma,
            sigma_hat_inv=linalg.spd_inverse(sigma),
            method="given-params",
        )
        return loc, "given-params", []
    if args.method is None:
        raise ConfigError("--method is required unless --mu/--sigma are given")
    method = _METHOD_NAMES.get(args.method)
    if method is None or method == TRUE_PARAMS:
        raise ConfigError(
            f"--method must be 'mean-cov' or 'median-tyler', got {args.method!r}"
        )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        loc = estimate_location_scatter(data, method)
    return loc, args.method, [str(w.message) for w in caught]


def cmd_estimate(args) -> int:
    data = load_csv_matrix(args.data)
    n, d = data.shape
    ks = _parse_k_values(args, n)
    loc, method_name, warning_messages = _location_scatter_from_args(args, data)
    estimates = hill_plot(data, loc, ks)
    config = {
        "data": args.data,
        "k_values": ks,
        "method": method_name,
        "out": args.out,
    }
    payload = {
        "n": n,
        "d": d,
        "method": method_name,
        "mu_hat": loc.mu_hat,
        "sigma_hat": loc.sigma_hat,
        "estimates": [{"k": k, "gamma_hat": g} for k, g in estimates],
        "warnings": warning_messages,
        "manifest": build_manifest("estimate", config, 0),
    }
    _write_output(args.out, dumps_json(payload) + "\n")
    _write_manifest_sidecar(args.out, payload["manifest"])
    return EXIT_OK


def cmd_hillplot(args) -> int:
    data = load_csv_matrix(args.data)
    n, _ = data.shape
    if args.k_step < 1:
        raise ConfigError(f"--k-step must be at least 1, got {args.k_step}")
    ks = list(range(args.k_min, args.k_max + 1, args.k_step))
    if not ks:
        raise ConfigError(
            f"empty k range: --k-min {args.k_min} > --k-max {args.k_max}"
        )
    for k in ks:
        if not 1 <= k <= n - 1:
            raise ConfigError(f"k must satisfy 1 <= k <= n - 1 = {n - 1}, got {k}")
    loc, method_name, _ = _location_scatter_from_args(args, data)
    series = hill_plot(data, loc, ks)
    config = {
        "data": args.data,
        "k_min": args.k_min,
        "k_max": args.k_max,
        "k_step": args.k_step,
        "method": method_name,
        "out": args.out,
    }
    buf = io.StringIO()
    write_csv(buf, ([k, g] for k, g in series))
    _write_output(args.out, buf.getvalue())
    _write_manifest_sidecar(args.out, build_manifest("hillplot", config, 0))
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    if args.trials < 1:
        raise ConfigError(f"--trials must be at least 1, got {args.trials}")
    if args.n < 4:
        raise ConfigError(f"--n must be at least 4, got {args.n}")
    if args.dim < 1:
        raise ConfigError(f"--dim must be at least 1, got {args.dim}")
    if args.perturbation_scale < 0:
        raise ConfigError("--perturbation-scale must be nonnegative")
    seed = resolve_seed(args.seed)
    variate = build_variate(args.family, args.alpha, args.nu, args.dim)
    scale = args.perturbation_scale
    d, n = args.dim, args.n

    applicable_count = 0
    violations = 0
    max_ratio_gap = None
    m_values = []
    bound_values = []
    slack_min = None

    for trial in range(args.trials):
        gen = RngStream(seed, trial).generator()
        mu = gen.normal(0.0, 1.0, d)
        g = gen.normal(0.0, 1.0, (d, d))
        sigma = np.einsum("ik,jk->ij", g, g) / d + 0.5 * np.eye(d)
        sigma = 0.5 * (sigma + sigma.T)
        model = EllipticalModel(mu=mu, sigma=sigma, variate=variate)
        sample, _ = sample_elliptical(model, n, gen)

        sigma_inv = linalg.spd_inverse(sigma)
        # a positive-semidefinite bump keeps the perturbed inverse valid at
        # any magnitude of the scale flag
        w = gen.normal(0.0, 1.0, (d, d))
        sigma_hat_inv = sigma_inv + scale * np.einsum("ik,jk->ij", w, w) / d
        sigma_hat_inv = 0.5 * (sigma_hat_inv + sigma_hat_inv.T)
        mu_hat = mu + scale * gen.normal(0.0, 1.0, d)

        coeffs = bounds.perturbation_coefficients(
            mu, sigma_inv, mu_hat, sigma_hat_inv, linalg.spectral_norm(sigma)
        )
        true_ordered = order_desc(mahalanobis_distances(sample, mu, sigma_inv))
        est_ordered = order_desc(
            mahalanobis_distances(sample, mu_hat, sigma_hat_inv)
        )
        ls = sorted({1, math.ceil(math.sqrt(n)), math.ceil(n / 10)})
        for l in ls:
            eps_rep = bounds.verify_epsilon_lemma(
                true_ordered**2, est_ordered**2, coeffs.m_n, l
            )
            if eps_rep.applicable:
                applicable_count += 1
                violations += eps_rep.violations
                if slack_min is None or eps_rep.max_slack < slack_min:
                    slack_min = eps_rep.max_slack
            ratio_rep = bounds.verify_log_ratio_lemma(
                true_ordered, est_ordered, coeffs.m_n, l
            )
            if ratio_rep.applicable:
                applicable_count += 1
                violations += ratio_rep.violations
                if max_ratio_gap is None or ratio_rep.max_ratio_gap > max_ratio_gap:
                    max_ratio_gap = ratio_rep.max_ratio_gap
                m_values.append(coeffs.m_n)
                bound_values.append(ratio_rep.bound)

    def _stats(vals):
        if not vals:
            return None
        arr = np.asarray(vals, dtype=float)
        return {
            "min": float(arr.min()),
            "mean": float(arr.mean()),
            "max": float(arr.max()),
        }

    config = {
        "trials": args.trials,
        "n": n,
        "dim": d,
        "family": args.family,
        "alpha": args.alpha,
        "nu": args.nu,
        "perturbation_scale": scale,
        "out": args.out,
    }
    payload = {
        "trials": args.trials,
        "applicable_count": applicable_count,
        "violations": violations,
        "max_ratio_gap": max_ratio_gap,
        "bound_stats": {
            "m_n": _stats(m_values),
            "log_ratio_bound": _stats(bound_values),
            "min_epsilon_slack": slack_min,
        },
        "manifest": build_manifest("verify-bounds", config, seed),
    }
    _write_output(args.out, dumps_json(payload) + "\n")
    _write_manifest_sidecar(args.out, payload["manifest"])
    return EXIT_OK


def _experiment_config_from_file(path: str) -> montecarlo.ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"could not parse --config {path!r}: {exc}") from None
    try:
        model_raw = raw["model"]
        family = model_raw["family"]
        dim = len(model_raw["mu"])
        variate = build_variate(
            family, model_raw.get("alpha"), model_raw.get("nu"), dim
        )
        model = EllipticalModel(
            mu=np.asarray(model_raw["mu"], dtype=float),
            sigma=np.asarray(model_raw["sigma"], dtype=float),
            variate=variate,
        )
        return montecarlo.ExperimentConfig(
            model=model,
            n_values=tuple(raw["n_values"]),
            replications=raw["replications"],
            base_seed=raw.get("base_seed", resolve_seed(None)),
            estimator_method=raw.get("estimator_method", SAMPLE_MEAN_COV),
            k_beta=raw.get("k_beta", 0.5 if "k_values" not in raw else None),
            k_values=tuple(raw["k_values"]) if "k_values" in raw else None,
        )
    except KeyError as exc:
        raise ConfigError(f"--config {path!r} is missing field {exc}") from None


def _experiment_config_inline(args) -> montecarlo.ExperimentConfig:
    for flag, name in ((args.dim, "--dim"), (args.n_values, "--n-values"), (args.replications, "--replications")):
        if flag is None:
            raise ConfigError(f"{name} is required without --config")
    model = build_model(args, args.dim)
    method = _METHOD_NAMES.get(args.method)
    if method is None:
        raise ConfigError(
            f"--method must be one of {sorted(_METHOD_NAMES)}, got {args.method!r}"
        )
    n_values = parse_int_list(args.n_values, "--n-values")
    k_values = (
        parse_int_list(args.k_list, "--k-list") if args.k_list is not None else None
    )
    return montecarlo.ExperimentConfig(
        model=model,
        n_values=tuple(n_values),
        replications=args.replications,
        base_seed=resolve_seed(args.seed),
        estimator_method=method,
        k_beta=args.k_beta if k_values is None else None,
        k_values=tuple(k_values) if k_values is not None else None,
    )


def _config_as_dict(config: montecarlo.ExperimentConfig) -> dict:
    variate = config.model.variate
    model = {
        "family": variate.family,
        "alpha": variate.alpha,
        "nu": variate.nu,
        "x_m": variate.x_m if variate.family == "pareto" else None,
        "mu": config.model.mu,
        "sigma": config.model.sigma,
    }
    return {
        "model": model,
        "n_values": list(config.n_values),
        "replications": config.replications,
        "base_seed": config.base_seed,
        "estimator_method": config.estimator_method,
        "k_beta": config.k_beta,
        "k_values": list(config.k_values) if config.k_values is not None else None,
    }


def cmd_experiment(args) -> int:
    if args.config is not None:
        config = _experiment_config_from_file(args.config)
    else:
        config = _experiment_config_inline(args)
    if args.workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {args.workers}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = montecarlo.run_experiment(config, workers=args.workers)
    manifest = build_manifest(
        "experiment", _config_as_dict(config), config.base_seed
    )
    aggregates = []
    for agg in result.aggregates:
        aggregates.append(
            {
                "n": agg.n,
                "k": agg.k,
                "count": agg.count,
                "failures": agg.failures,
                "mean_normalized_error": agg.mean_normalized_error,
                "sd_normalized_error": agg.sd_normalized_error,
                "median_normalized_error": agg.median_normalized_error,
                "q05_normalized_error": agg.q05_normalized_error,
                "q95_normalized_error": agg.q95_normalized_error,
                "median_abs_error": agg.median_abs_error,
                "p95_scaled_gap": agg.p95_scaled_gap,
                "target_mean": agg.target_mean,
                "target_sd": agg.target_sd,
                "ks_stat": agg.ks_stat,
            }
        )
    payload = {
        "gamma": config.model.variate.gamma,
        "estimator_method": config.estimator_method,
        "replications": config.replications,
        "aggregates": aggregates,
        "total_failures": sum(a.failures for a in result.aggregates),
        "warnings": [str(w.message) for w in caught],
        "manifest": manifest,
    }
    _write_output(args.out, dumps_json(payload) + "\n")
    _write_manifest_sidecar(args.out, manifest)
    if args.records_out is not None:
        buf = io.StringIO()
        rows = []
        for rec in result.records:
            rep = rec.bound_report
            rows.append(
                [
                    rec.rep_id,
                    rec.n,
                    rec.k,
                    rec.gamma_hat_true,
                    rec.gamma_hat_est,
                    rec.normalized_error,
                    rec.estimator_gap,
                    rep.m_n if rep is not None else math.nan,
                    rep.b_n if rep is not None else math.nan,
                    rec.failed,
                    rec.failure if rec.failure is not None else "",
                ]
            )
        write_csv(buf, rows)
        _write_output(args.records_out, buf.getvalue())
        _write_manifest_sidecar(args.records_out, manifest)
    return EXIT_OK


# -- argument parser -------------------------------------------------------


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--alpha", type=float, help="tail index for pareto/frechet")
    p.add_argument("--nu", type=float, help="degrees of freedom for t-radial")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sephill",
        description="Separating Hill estimator toolkit for heavy-tailed elliptical data",
    )
    parser.add_argument("--version", action="version", version=f"sephill {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="draw synthetic elliptical data to CSV")
    _add_family_flags(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", help="comma-separated location (default: origin)")
    p.add_argument("--sigma", default="identity", help="scatter CSV file or 'identity'")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    p.add_argument("--radii-out", help="also write the generating radii")
    p.add_argument("--header", action="store_true", help="emit x1..xd column names")
    p.add_argument(
        "--force-radii",
        help="comma-separated radii to use instead of sampling (testing aid)",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the extreme value index from CSV data")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--k-list", help="comma-separated k values")
    p.add_argument("--method", choices=["mean-cov", "median-tyler"])
    p.add_argument("--mu", help="known location (with --sigma): skip estimation")
    p.add_argument("--sigma", help="known scatter file or 'identity' (with --mu)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("hillplot", help="emit (k, gamma_hat) pairs over a k range")
    p.add_argument("--data", required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--k-step", type=int, default=1)
    p.add_argument("--method", choices=["mean-cov", "median-tyler"])
    p.add_argument("--mu")
    p.add_argument("--sigma")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_hillplot)

    p = sub.add_parser(
        "verify-bounds", help="randomized verification of the perturbation envelopes"
    )
    _add_family_flags(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--perturbation-scale", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("--config", help="JSON experiment description")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--alpha", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--mu")
    p.add_argument("--sigma", default="identity")
    p.add_argument("--n-values", help="comma-separated sample sizes")
    p.add_argument("--k-beta", type=float, default=0.5)
    p.add_argument("--k-list", help="explicit k per sample size")
    p.add_argument(
        "--method",
        default="mean-cov",
        choices=sorted(_METHOD_NAMES),
    )
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    p.add_argument("--records-out", help="per-replication CSV")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FailureCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE_CAP
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SepHillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
