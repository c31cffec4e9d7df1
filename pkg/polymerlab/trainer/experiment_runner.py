# Copyright 2026 The polymerlab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Subcommand dispatcher of the experiment CLI.

Each subcommand turns a validated ExperimentConfig into a ResultTable (CSV rows) and a JSON summary.
Errors are mapped to exit codes and reported as one JSON line on standard error; in that case no output
file is written.
"""

import dataclasses
import json
import math
import sys
from contextlib import contextmanager
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from codetiming import Timer

from polymerlab.disorder.environment import Environment, Site, omega
from polymerlab.estimators.concentration import tail_profile
from polymerlab.estimators.exponents import scaling_exponents
from polymerlab.estimators.influence import site_influence
from polymerlab.estimators.rate import convergence_gap
from polymerlab.estimators.replicas import (ReplicaStats, doubling_means_check, estimate_free_energy, jensen_sandwich,
                                            run_replicas, variance_scale_table)
from polymerlab.nearly_gamma.certify import certify, default_grid, exp_moment_certificate
from polymerlab.nearly_gamma.density import density_from_model, load_density_table
from polymerlab.polymer.oracle import brute_force_log_partition
from polymerlab.polymer.transfer import (log_partition, max_path_weight, mean_square_displacement,
                                         occupation_probabilities)
from polymerlab.protocol import ResultTable, to_jsonable, write_results
from polymerlab.skeletons.skeleton import ScaleFns, decomposition_check
from polymerlab.skeletons.smap import classify, s_map
from polymerlab.utils.config import ExperimentConfig, config_from_dict, parse_config
from polymerlab.utils.errors import ConfigValidationError, DomainError, NumericFailure, ResourceCapExceeded
from polymerlab.utils.logging_utils import get_logger
from polymerlab.utils.tracking import Tracking
from polymerlab.workers.replica_pool import ReplicaPool

__all__ = [
    'EXIT_OK', 'EXIT_VALIDATION', 'EXIT_RESOURCE_CAP', 'EXIT_NUMERIC', 'HANDLED_ERRORS', 'SUBCOMMANDS', 'execute',
    'report_error', 'run'
]

logger = get_logger(__file__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RESOURCE_CAP = 2
EXIT_NUMERIC = 3

Outcome = Tuple[ResultTable, Dict[str, Any]]
HANDLED_ERRORS = (ConfigValidationError, DomainError, ResourceCapExceeded, NumericFailure)


@contextmanager
def _timer(name: str, timing_raw: Dict[str, float]):
    with Timer(name=name, logger=None) as timer:
        yield
    timing_raw[name] = timer.last


def _echo(cfg: ExperimentConfig, **extra) -> Dict[str, Any]:
    params = {'d': cfg.d, 'beta': cfg.beta, 'disorder': cfg.model().name}
    params.update(extra)
    return params


def _replica_stats(cfg: ExperimentConfig, pool: ReplicaPool, N_grid=None) -> ReplicaStats:
    N_grid = sorted(set(N_grid if N_grid is not None else cfg.N_grid))
    return run_replicas(cfg.model(), [cfg.params(N) for N in N_grid],
                        cfg.replicas,
                        cfg.base_seed,
                        pool=pool,
                        max_memory_mb=cfg.caps.max_memory_mb)


def _summary(name: str, cfg: ExperimentConfig, **fields) -> Dict[str, Any]:
    out = {'experiment': name, 'config': dataclasses.asdict(cfg)}
    out.update(fields)
    return out


def run_logz(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    """Single-environment values (replica 0) with their exact cross-checks."""
    env = Environment(cfg.model(), cfg.base_seed, 0)
    table = ResultTable()
    per_n = {}
    for N in cfg.N_grid:
        params = cfg.params(N)
        echo = _echo(cfg, N=N)
        values = {
            'log_Z': log_partition(env, params),
            'mean_square_displacement': mean_square_displacement(env, params),
            'max_path_weight': max_path_weight(env, params),
        }
        occupation = occupation_probabilities(env, params)
        values['occupation_total'] = occupation.total()
        if (2 * cfg.d)**N <= cfg.caps.max_brute_force_paths:
            values['brute_force_abs_error'] = abs(brute_force_log_partition(env, params) - values['log_Z'])
        site = Site(1, (1,) + (0,) * (cfg.d - 1))
        h = cfg.fd_step
        w = omega(env, site)
        plus = log_partition(env.with_overrides({site: w + h}), params)
        minus = log_partition(env.with_overrides({site: w - h}), params)
        values['gradient_fd'] = (plus - minus) / (2 * h)
        values['beta_occupation'] = cfg.beta * occupation.probability(site)
        for metric, value in values.items():
            table.add('logz', echo, metric, value)
        per_n[str(N)] = values
    return table, _summary('logz', cfg, replica_index=0, values=per_n)


def run_replicas_cmd(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    stats = _replica_stats(cfg, pool)
    table = ResultTable()
    for s in stats.summaries:
        echo = _echo(cfg, N=s.N, R=s.R)
        table.add('replicas', echo, 'mean_log_Z', s.mean, s.stderr)
        table.add('replicas', echo, 'var_log_Z', s.variance)
        for q, v in s.quantiles.items():
            table.add('replicas', echo, f'quantile_{round(100 * q):02d}', v)
        table.add('replicas', echo, 'msd', s.msd_mean, s.msd_stderr)
    jensen = jensen_sandwich(stats)
    for row in jensen.to_dict(orient='records'):
        table.add('replicas', _echo(cfg, N=row['N'], R=stats.R), 'jensen_ok', row['lower_ok'] and row['upper_ok'])
    return table, _summary('replicas', cfg, stats=stats.to_frame().to_dict(orient='records'),
                           jensen=jensen.to_dict(orient='records'))


def run_free_energy(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    stats = _replica_stats(cfg, pool)
    estimate = estimate_free_energy(stats)
    table = ResultTable()
    for s in stats.summaries:
        table.add('free-energy', _echo(cfg, N=s.N, R=s.R), 'mean_log_Z_per_N', s.mean / s.N, s.stderr / s.N)
    table.add('free-energy', _echo(cfg, N=estimate.argmax_N, R=stats.R), 'p_hat', estimate.p_hat, estimate.stderr)
    doubling = doubling_means_check(stats)
    return table, _summary('free-energy', cfg, p_hat=estimate.p_hat, p_hat_stderr=estimate.stderr,
                           argmax_N=estimate.argmax_N, caveat=estimate.caveat,
                           doubling=doubling.to_dict(orient='records'))


def run_concentration(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    N_grid = [N for N in cfg.N_grid if N >= 2]
    if not N_grid:
        raise DomainError('concentration profiles need N >= 2 on the grid')
    stats = _replica_stats(cfg, pool, N_grid)
    table = ResultTable()
    profiles = {}
    for N in stats.N_grid:
        profile = tail_profile(stats.samples(N), N, cfg.t_grid)
        for t, e in zip(profile.t_grid, profile.exceedance):
            table.add('concentration', _echo(cfg, N=N, R=stats.R, t=t), 'exceedance', e, units='probability')
        profiles[str(N)] = dataclasses.asdict(profile)
    scale = variance_scale_table(stats)
    return table, _summary('concentration', cfg, profiles=profiles, variance_scale=scale.to_dict(orient='records'))


def run_rate(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    stats = _replica_stats(cfg, pool, list(cfg.N_grid) + [cfg.reference_N])
    estimate = estimate_free_energy(stats)
    report = convergence_gap(stats, estimate, N_values=cfg.N_grid)
    table = ResultTable()
    for row in report.rows:
        echo = _echo(cfg, N=row.N, R=stats.R)
        table.add('rate', echo, 'gap', row.gap, row.gap_stderr)
        table.add('rate', echo, 'normalized_gap', row.normalized_gap)
        table.add('rate', echo, 'weak_normalized_gap', row.weak_normalized_gap)
    return table, _summary('rate', cfg, p_hat=report.p_hat, p_hat_stderr=report.p_hat_stderr,
                           argmax_N=estimate.argmax_N, gaps_nonnegative=report.gaps_nonnegative(),
                           normalized_growth=report.normalized_growth(), notes=report.notes)


def _default_sites(cfg: ExperimentConfig, N: int):
    m = max(1, N // 2)
    return [Site(m, ((m % 2),) + (0,) * (cfg.d - 1))]


def run_influence(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    N = max(cfg.N_grid)
    params = cfg.params(N)
    sites = [Site(s[0], tuple(s[1:])) for s in cfg.influence.sites] or _default_sites(cfg, N)
    report = site_influence(cfg.model(), params, sites, cfg.influence.endpoint, R=cfg.replicas,
                            resamples_per_replica=cfg.influence.resamples, base_seed=cfg.base_seed, pool=pool)
    table = ResultTable()
    for info in report.sites:
        echo = _echo(cfg, N=N, R=report.R, m=info.site.n, y=list(info.site.x))
        table.add('influence', echo, 'Y2', info.Y2.value, info.Y2.stderr)
        for name in ('L2', 'L2_plus', 'L2_minus'):
            moment = getattr(info, name)
            if moment is not None:
                table.add('influence', echo, name, moment.value, moment.stderr)
    table.add('influence', _echo(cfg, N=N, R=report.R), 'Y_sum2', report.Y_sum2.value, report.Y_sum2.stderr)
    table.add('influence', _echo(cfg, N=N, R=report.R), 'L2_plus_bound', report.bound)
    return table, _summary('influence', cfg, sites=report.to_frame().to_dict(orient='records'), bound=report.bound,
                           rho_hat=report.rho_hat, notes=report.notes)


def run_exponents(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    stats = _replica_stats(cfg, pool)
    report = scaling_exponents(stats)
    table = ResultTable()
    for s in stats.summaries:
        echo = _echo(cfg, N=s.N, R=s.R)
        table.add('exponents', echo, 'var_log_Z', s.variance)
        table.add('exponents', echo, 'msd', s.msd_mean, s.msd_stderr)
    echo = _echo(cfg, R=stats.R)
    table.add('exponents', echo, 'chi_hat', report.chi_hat)
    table.add('exponents', echo, 'xi_hat', report.xi_hat)
    table.add('exponents', echo, 'hyperscaling_residual', report.hyperscaling_residual)
    return table, _summary('exponents', cfg, **dataclasses.asdict(report))


def run_ng_cert(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    ng = cfg.nearly_gamma
    spec = load_density_table(ng.table_path) if ng.table_path else density_from_model(cfg.model())
    report = certify(spec, grid=default_grid(spec, ng.y_min, ng.y_max, ng.points), B=ng.B)
    table = ResultTable()
    for y, value, tail in zip(report.grid, report.psi_values, report.tail_flags):
        table.add('ng-cert', {'density': spec.name, 'y': y, 'tail_path': tail}, 'psi', value)
    echo = {'density': spec.name}
    table.add('ng-cert', echo, 'B', report.B)
    table.add('ng-cert', echo, 'A_fit', report.A_fit)
    table.add('ng-cert', echo, 'moment_threshold', report.moment_threshold)
    for verdict in report.cond_iv + report.cond_v:
        table.add('ng-cert', dict(echo, side=verdict.side.value), f'condition_{verdict.condition}', verdict.verdict)
    summary = _summary('ng-cert', cfg, report=report.to_dict())
    summary['exp_moment_certificate_4beta'] = exp_moment_certificate(report, 4.0 * cfg.beta)
    return table, summary


def run_skeleton(cfg: ExperimentConfig, pool: ReplicaPool) -> Outcome:
    n = cfg.block_length
    scale = ScaleFns(K13=cfg.K13)
    rho, theta, phi = scale(n)
    estimate = estimate_free_energy(_replica_stats(cfg, pool))
    smap = s_map(cfg.model(), n, cfg.beta, cfg.replicas, estimate.p_hat, base_seed=cfg.base_seed, d=cfg.d, pool=pool)
    efficiency_map = None
    if cfg.efficiency_m is not None and cfg.efficiency_m != n:
        efficiency_map = s_map(cfg.model(), cfg.efficiency_m, cfg.beta, cfg.replicas, estimate.p_hat,
                               base_seed=cfg.base_seed, d=cfg.d, pool=pool)
    labels = classify(smap, scale, efficiency_map)
    adequate, efficient = set(labels.adequate), set(labels.efficient)
    table = ResultTable()
    for x, entry in sorted(smap.entries.items()):
        echo = {'n': n}
        echo.update({f'x{i + 1}': v for i, v in enumerate(x)})
        echo.update({'adequate': x in adequate, 'efficient': x in efficient})
        table.add('skeleton', echo, 's_hat', entry.s_hat, entry.stderr)

    env = Environment(cfg.model(), cfg.base_seed, 0)
    residual = decomposition_check(env, cfg.params(2 * n), n, max_count=cfg.caps.max_enumeration)
    return table, _summary('skeleton',
                           cfg,
                           p_hat=estimate.p_hat,
                           scale_functions={'rho': rho, 'theta': theta, 'phi': phi},
                           classification=dataclasses.asdict(labels),
                           decomposition_residual=residual,
                           notes=smap.notes)


SUBCOMMANDS: Dict[str, Callable[[ExperimentConfig, ReplicaPool], Outcome]] = {
    'logz': run_logz,
    'replicas': run_replicas_cmd,
    'free-energy': run_free_energy,
    'concentration': run_concentration,
    'rate': run_rate,
    'influence': run_influence,
    'exponents': run_exponents,
    'ng-cert': run_ng_cert,
    'skeleton': run_skeleton,
}


def execute(subcommand: str, config: ExperimentConfig, threads: int = 1, timing_raw=None) -> Outcome:
    """Run one subcommand and return its results without writing anything."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigValidationError([f'unknown subcommand {subcommand!r}; expected one of {sorted(SUBCOMMANDS)}'])
    timing_raw = {} if timing_raw is None else timing_raw
    with _timer(subcommand, timing_raw):
        return SUBCOMMANDS[subcommand](config, ReplicaPool(threads))


def report_error(e: Exception) -> int:
    """Write the one-line JSON error record to standard error and return the exit code for it."""
    if isinstance(e, ConfigValidationError):
        code, details = EXIT_VALIDATION, {'errors': e.errors}
    elif isinstance(e, ResourceCapExceeded):
        code, details = EXIT_RESOURCE_CAP, {'what': e.what, 'estimate': e.estimate, 'cap': e.cap}
    elif isinstance(e, NumericFailure):
        code, details = EXIT_NUMERIC, e.diagnostics
    else:
        code, details = EXIT_VALIDATION, {}
    payload = {'error': type(e).__name__, 'message': str(e), 'details': to_jsonable(details)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr, flush=True)
    return code


def run(subcommand: str,
        config: Union[ExperimentConfig, str, Mapping],
        out: str,
        threads: int = 1,
        tracker: Optional[Tracking] = None) -> int:
    """Execute a subcommand and write ``<out>.csv`` and ``<out>.json``.

    Args:
        config: a validated config, a decoded config mapping or raw JSON text.
        out: output path prefix.
        threads: worker count; never changes the results.

    Returns:
        exit code: 0 success, 1 validation or domain error, 2 resource cap refusal, 3 numeric failure.
    """
    timing_raw: Dict[str, float] = {}
    try:
        if isinstance(config, str):
            cfg = parse_config(config)
        elif isinstance(config, Mapping):
            cfg = config_from_dict(config)
        else:
            cfg = config
        table, summary = execute(subcommand, cfg, threads, timing_raw)
        write_results(table, summary, out)
    except HANDLED_ERRORS as e:
        return report_error(e)
    logger.info(f'{subcommand} wrote {len(table)} rows to {out}.csv')
    if tracker is not None:
        tracker.log(data={f'timing_s/{k}': v for k, v in timing_raw.items()}, step=0)
    return EXIT_OK
