"""
Command Line Interface
======================

click command group over the support engine. Every command builds a
RunConfig from an optional JSON config file plus flag overrides, runs the
computation, prints tables and a check summary, optionally writes a JSON
report, and exits nonzero when any check that is not an expected failure
fails or is inconclusive.

    hypersupport describe --algebra no-tpp
    hypersupport support -m truncated:x2:3 --algebra no-tpp
    hypersupport tpp-check -m truncated:x2:3 -m lambda --algebra no-tpp
    hypersupport run-suite twtt --report twtt.json
"""

import functools
import logging
from typing import List, Optional

import click

from dg_koszul import koszul_duality_check, verify_twtt
from errors import ConfigError, InconclusiveError, SupportEngineError
from fd_modules import canonical_half_braiding, check_half_braiding, equivariant_induction, trivial_half_braiding
from homology import ext_table, minimal_resolution
from hopf_algebras import hopf_axioms_check
from module_catalog import parse_module
from q_regular import (candidate_from_names, check_q_regular, koszul_transfer_check,
                       root_vectors_typeA)
from reports import Report, degree_table, render_table, stopwatch
from result_cache import create_result_cache
from run_config import RunConfig, make_config
from suites import SUITES, run_suite
from support_varieties import (centralized_tpp_check, cohom_support, rank_variety_oracle,
                               tpp_check)

LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def config_options(func):
    """Flags shared by every command."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='JSON config file'),
        click.option('--algebra', default=None, help='Named algebra config'),
        click.option('--field', 'field_name', default=None, help='prime, prime:<p> or cyclotomic'),
        click.option('-m', '--module', 'modules', multiple=True, help='Module spec (repeatable)'),
        click.option('--degree-bound', type=int, default=None, help='Top Ext degree D'),
        click.option('--stability', type=int, default=None, help='Stability window s'),
        click.option('--ext-degree', 'extension', type=int, default=None,
                     help='Points are enumerated over F_{p^e}'),
        click.option('--cache-dir', type=click.Path(file_okay=False), default=None,
                     help='Cache root (default $HYPERSUPPORT_CACHE_DIR or ~/.cache/hypersupport)'),
        click.option('--cache-strategy', type=click.Choice(['LRU', 'LFU'], case_sensitive=False), default=None,
                     help='Eviction policy of the in-memory resolution cache'),
        click.option('--report', type=click.Path(dir_okay=False), default=None, help='JSON report path'),
        click.option('--seed', type=int, default=None, help='Seed of every random choice'),
        click.option('--workers', type=int, default=None, help='Worker threads'),
        click.option('--table-csv', type=click.Path(dir_okay=False), default=None,
                     help='Also write per-degree tables as CSV'),
    ]
    for option in reversed(options):
        func = option(func)

    @functools.wraps(func)
    def wrapper(config_path, algebra, field_name, modules, degree_bound, stability, extension,
                cache_dir, cache_strategy, report, seed, workers, table_csv, **kwargs):
        try:
            config = make_config(config_path, algebra=algebra, field_name=field_name,
                                 modules=list(modules) or None, degree_bound=degree_bound,
                                 stability=stability, extension=extension, cache_dir=cache_dir,
                                 cache_strategy=cache_strategy, report=report, seed=seed, workers=workers,
                                 table_csv=table_csv)
        except ConfigError as exc:
            raise click.UsageError(str(exc)) from exc
        return _guarded(func, config, **kwargs)
    return wrapper


def _guarded(func, config: RunConfig, **kwargs):
    try:
        return func(config, **kwargs)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    except InconclusiveError as exc:
        raise click.ClickException(f"inconclusive: {exc}") from exc
    except SupportEngineError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc


def _setup(config: RunConfig):
    H = config.build_algebra()
    cache = create_result_cache(config.cache_dir, strategy=config.cache_strategy)
    return H, cache


def _modules(H, config: RunConfig, cache, count: Optional[int] = None):
    specs: List[str] = list(config.modules)
    if count is not None and len(specs) < count:
        raise ConfigError(f"this command needs {count} module specs, got {len(specs)}")
    return [(spec, parse_module(H, spec, cache)) for spec in specs[:count]]


def _finish(report: Report, config: RunConfig):
    click.echo()
    click.echo(render_table(report.summary_frame()))
    if config.report:
        report.write(config.report)
        click.echo(f"Report written to {config.report}")
    stats = report.get_stats()
    click.echo(f"{stats['total']} checks: {stats['passed']} passed, {stats['failed']} failed, "
               f"{stats['inconclusive']} inconclusive, {stats['expected_failure']} expected failures")
    if report.exit_code:
        click.get_current_context().exit(report.exit_code)


# ============================================================================
# COMMANDS
# ============================================================================

@click.group()
@click.option('--verbose', is_flag=True, help='Debug logging')
def cli(verbose: bool):
    """Support varieties and tensor product properties of finite-dimensional Hopf algebras."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT)


@cli.command()
@config_options
def describe(config: RunConfig):
    """Algebra dimensions, grouplikes, deformation generators and Hopf-axiom verdicts."""
    H = config.build_algebra()
    info = H.describe()
    click.echo(f"Algebra:            {info['name']} ({info['kind']})")
    click.echo(f"Field:              {info['field']}")
    click.echo(f"Dimension:          {info['dimension']}")
    click.echo(f"Positive part:      {info['positive_part_dimension']}")
    click.echo(f"Generators:         {', '.join(info['generators'])}")
    click.echo(f"Grouplikes:         {info['grouplikes']}")
    click.echo(f"Simples:            {info['simples']}")
    click.echo(f"Deformation:        {', '.join(info['deformation_generators'])}")
    click.echo(f"Z is a Hopf subalgebra: {info['z_is_hopf']}")
    report = Report(config, algebra=H.name)
    with stopwatch() as timer:
        axioms = hopf_axioms_check(H)
    failed = [name for name, entry in axioms['checks'].items() if not entry['passed']]
    report.add('hopf-axioms', axioms['passed'], "passed" if axioms['passed'] else "failed",
               failed or None, {'describe': info, **axioms}, seconds=timer['seconds'])
    _finish(report, config)


@cli.command()
@config_options
def resolve(config: RunConfig):
    """Minimal resolution ranks of each module up to degree D."""
    H, cache = _setup(config)
    report = Report(config, algebra=H.name)
    for spec, V in _modules(H, config, cache):
        with stopwatch() as timer:
            res = minimal_resolution(V, config.degree_bound, cache=cache)
        frame = degree_table([{'degree': k, 'rank': r} for k, r in enumerate(res.ranks)])
        click.echo(f"\n{spec} (dim {V.dim})")
        click.echo(render_table(frame, config.table_csv))
        report.add(f"resolve/{spec}", not res.partial, "complete", details={'ranks': res.ranks},
                   seconds=timer['seconds'])
    _finish(report, config)


@cli.command()
@click.option('--target', default='lambda', help='Second argument W of Ext(V, W)')
@click.option('--non-equivariant', is_flag=True, help='Hom over u+ instead of the full algebra')
@config_options
def ext(config: RunConfig, target: str, non_equivariant: bool):
    """Per-degree Ext(V, W) dimensions with theta cokernels."""
    H, cache = _setup(config)
    W = parse_module(H, target, cache)
    report = Report(config, algebra=H.name)
    for spec, V in _modules(H, config, cache):
        with stopwatch() as timer:
            table = ext_table(V, W, config.degree_bound, equivariant=not non_equivariant, cache=cache)
            commute = table.theta_commute()
        click.echo(f"\nExt({spec}, {target})")
        click.echo(render_table(degree_table(table.to_rows()), config.table_csv))
        report.add(f"ext/{spec}|{target}/theta-commute", commute['passed'],
                   witnesses=commute['first_failure'],
                   details={'dims': table.dims, 'generation_degree': table.generation_degree()},
                   seconds=timer['seconds'])
    _finish(report, config)


@cli.command()
@click.option('--workers-per-module', type=int, default=1, help='Threads over points')
@config_options
def support(config: RunConfig, workers_per_module: int):
    """Cohomological support of each module over P^{n-1}(F_{p^e})."""
    H, cache = _setup(config)
    report = Report(config, algebra=H.name)
    for spec, V in _modules(H, config, cache):
        try:
            with stopwatch() as timer:
                result = cohom_support(V, config.degree_bound, config.stability, config.extension,
                                       sigma_check=config.sigma_check, workers=workers_per_module,
                                       cache=cache)
        except InconclusiveError as exc:
            report.add_inconclusive(f"support/{spec}", exc, timer['seconds'])
            continue
        points = [str(c) for c in result.points]
        click.echo(f"\nsupp({spec}) = {{{', '.join(points)}}}")
        if result.ideal:
            click.echo(f"  annihilator ideal: ({', '.join(result.ideal)})")
        report.add(f"support/{spec}", all(result.checks.values()), f"{len(points)} points",
                   points, result.describe(), seconds=timer['seconds'])
    _finish(report, config)


@cli.command('tpp-check')
@config_options
def tpp_check_command(config: RunConfig):
    """Compare supp(V (x) W) with supp(V) intersected with supp(W)."""
    H, cache = _setup(config)
    (vs, V), (ws, W) = _modules(H, config, cache, 2)
    report = Report(config, algebra=H.name)
    with stopwatch() as timer:
        result = tpp_check(V, W, config.degree_bound, config.stability, config.extension, cache=cache)
    click.echo(f"supp({vs} (x) {ws}) = {{{', '.join(result['lhs_points'])}}}")
    click.echo(f"supp({vs}) n supp({ws}) = {{{', '.join(result['rhs_points'])}}}")
    report.add(f"tpp/{vs}|{ws}", result['verdict'] == 'equal', result['verdict'],
               result['only_lhs'] + result['only_rhs'] or None, result, seconds=timer['seconds'])
    _finish(report, config)


BRAIDINGS = {
    'canonical': canonical_half_braiding,
    'induced': equivariant_induction,
    'identity': trivial_half_braiding,
}


@cli.command('ctpp-check')
@click.option('--braiding', type=click.Choice(sorted(BRAIDINGS)), default='canonical',
              help='Half-braiding on the first module')
@config_options
def ctpp_check_command(config: RunConfig, braiding: str):
    """Centralized TPP for the first module with a half-braiding and the second module."""
    H, cache = _setup(config)
    (vs, V), (ws, W) = _modules(H, config, cache, 2)
    b = BRAIDINGS[braiding](V)
    report = Report(config, algebra=H.name)
    validation = check_half_braiding(b)
    failed = [name for name, entry in validation['checks'].items() if not entry['passed']]
    report.add(f"half-braiding/{vs}", validation['passed'], witnesses=failed or None, details=validation)
    if validation['passed']:
        with stopwatch() as timer:
            result = centralized_tpp_check(b, W, config.degree_bound, config.stability,
                                           config.extension, cache=cache)
        click.echo(f"supp({b.module.provenance} (x) {ws}) = {{{', '.join(result['lhs_points'])}}}")
        click.echo(f"intersection = {{{', '.join(result['rhs_points'])}}}")
        report.add(f"centralized-tpp/{vs}|{ws}", result['verdict'] == 'equal', result['verdict'],
                   result['only_lhs'] + result['only_rhs'] or None, result, seconds=timer['seconds'])
    _finish(report, config)


@cli.command('oracle-compare')
@config_options
def oracle_compare(config: RunConfig):
    """Cohomological support against the rank variety, for k[x_1..x_n]/(x_i^p)."""
    H, cache = _setup(config)
    report = Report(config, algebra=H.name)
    for spec, V in _modules(H, config, cache):
        with stopwatch() as timer:
            computed = {str(c) for c in cohom_support(V, config.degree_bound, config.stability,
                                                      config.extension, sigma_check=False,
                                                      with_ideal=False, cache=cache).points}
            oracle = {str(c) for c in rank_variety_oracle(V, config.extension).points}
        click.echo(f"{spec}: cohomological {sorted(computed)}, rank variety {sorted(oracle)}")
        report.add(f"oracle/{spec}", computed == oracle, "agrees" if computed == oracle else "disagrees",
                   sorted(computed ^ oracle) or None,
                   {'cohomological': sorted(computed), 'rank_variety': sorted(oracle)},
                   seconds=timer['seconds'])
    _finish(report, config)


@cli.command('koszul-verify')
@click.option('--non-equivariant', is_flag=True, help='Hom over u+ instead of the full algebra')
@config_options
def koszul_verify(config: RunConfig, non_equivariant: bool):
    """Twisted product cohomology against minimal-resolution Ext for a module pair."""
    H, cache = _setup(config)
    specs = _modules(H, config, cache)
    if len(specs) == 1:
        specs.append(specs[0])
    (vs, V), (ws, W) = specs[:2]
    report = Report(config, algebra=H.name)
    with stopwatch() as timer:
        result = verify_twtt(V, W, config.degree_bound, equivariant=not non_equivariant, cache=cache)
    click.echo(render_table(degree_table(result['degrees']), config.table_csv))
    unequal = [row['degree'] for row in result['degrees'] if not row['equal']]
    report.add(f"twtt/{vs}|{ws}", result['passed'], "equal" if result['passed'] else "unequal",
               unequal or None, result, seconds=timer['seconds'])
    duality = koszul_duality_check(H.fieldspec, H.n, config.degree_bound)
    report.add("koszul-duality", duality['passed'], details=duality)
    _finish(report, config)


@cli.command('qregular-check')
@click.option('--names', default=None, help='Comma-separated PBW generators forming the sequence')
@click.option('--type-a', nargs=2, type=int, default=None, help='Rank n and root order l of type A_n')
@click.option('--truncation', type=int, default=None, help='Top height of the truncated check')
@click.option('--transfer', is_flag=True, help='Also check the Koszul transfer')
@config_options
def qregular_check(config: RunConfig, names: Optional[str], type_a, truncation: Optional[int],
                   transfer: bool):
    """q-regular sequence checks, for named generators or type A root vectors."""
    if type_a:
        cand = root_vectors_typeA(*type_a)
    elif names:
        cand = candidate_from_names(config.build_algebra(), [n.strip() for n in names.split(',')])
    else:
        raise ConfigError("give --names or --type-a")
    report = Report(config, algebra=cand.algebra.name)
    with stopwatch() as timer:
        try:
            result = (koszul_transfer_check if transfer else check_q_regular)(
                cand, truncation, config.workers)
        except InconclusiveError as exc:
            report.add_inconclusive('q-regular', exc, timer['seconds'])
            result = None
    if result is not None:
        click.echo(f"sequence:   {', '.join(result['sequence'])}")
        click.echo(f"characters: {result['characters']}")
        click.echo(f"truncation: {result['truncation']} ({result['note']})")
        report.add('q-regular', result['passed'], witnesses=result['violations'] or None, details=result,
                   seconds=timer['seconds'])
    _finish(report, config)


@cli.command('run-suite')
@click.argument("name", required=False, type=click.Choice(list(SUITES)))
@config_options
def run_suite_command(config: RunConfig, name: Optional[str]):
    """Run one of the reproduction suites (default: the config's suite)."""
    name = name or config.suite
    if not name:
        raise ConfigError("name a suite or set 'suite' in the config")
    cache = create_result_cache(config.cache_dir, strategy=config.cache_strategy)
    report = run_suite(name, config, cache)
    _finish(report, config)


def main():
    cli()


if __name__ == '__main__':
    main()
