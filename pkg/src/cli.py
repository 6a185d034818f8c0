"""
warpmatrix command line
Results go to stdout; logs and error messages go to stderr.
"""

import functools
import json
import logging
import sys

import click
import numpy as np

from src.config.settings import load_settings
from src.constants.claims import ExitCode, Scope
from src.services.exactla import RankAccumulator, rank_bareiss, rank_exact
from src.services.knotio import KnotDiagram, parse_code, parse_diagram_arg, parse_projection, render
from src.services.verification_service import (
    Corpus,
    VerificationScope,
    render_json_lines,
    render_table,
    summarize,
    verify_all,
)
from src.services.warpcore import incidence_matrix, warping_degree_sequence
from src.services.warpmat import (
    canonical_form,
    column_pairs,
    gauss_diagram,
    ou_matrix,
    streaming_rank,
    warping_matrix,
    warping_matrix_without_signs,
)
from src.utils.errors import InputError, WarpMatrixError
from src.utils.matrix_io import dump_matrix, load_matrix

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ['text', 'csv', 'json']

format_option = click.option(
    '--format', 'fmt', type=click.Choice(OUTPUT_FORMATS), default='text', show_default=True,
    help='Output format.',
)
assignment_option = click.option(
    '--assignment', type=int, default=None,
    help='Assignment index, when DIAGRAM is a plain Gauss code.',
)
limit_option = click.option(
    '--max-crossings', 'limit', type=click.IntRange(min=1), default=None,
    help='Override the crossing limit (default from settings).',
)
jobs_option = click.option(
    '--jobs', type=click.IntRange(min=1), default=None,
    help='Worker processes (default WARPMATRIX_JOBS).',
)


def handle_errors(command):
    """Map domain errors to their exit codes with a one-line message on stderr"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except WarpMatrixError as e:
            logger.debug(f"{type(e).__name__} in {command.__name__}", exc_info=True)
            click.echo(f"Error: {e.message}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def read_stdin_matrix():
    text = click.get_text_stream('stdin').read()
    return load_matrix(text)


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Debug logging on stderr.')
def cli(verbose):
    """Warping degrees, warping matrices and their rank claims for Gauss codes."""
    try:
        level = load_settings().log_level
    except WarpMatrixError:
        level = 'INFO'
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.INFO),
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
    )


@cli.command()
@click.argument('code')
@format_option
@limit_option
@jobs_option
@handle_errors
def wm(code, fmt, limit, jobs):
    """Warping matrix M(P) of a projection."""
    projection = parse_projection(code)
    matrix = warping_matrix(projection, limit=limit, jobs=jobs or load_settings().jobs)
    click.echo(dump_matrix(matrix, fmt), nl=False)


@cli.command()
@click.argument('diagram')
@assignment_option
@format_option
@limit_option
@jobs_option
@handle_errors
def wmbar(diagram, assignment, fmt, limit, jobs):
    """M(P) without the row of DIAGRAM."""
    parsed = parse_diagram_arg(diagram, assignment)
    matrix = warping_matrix_without_signs(parsed, limit=limit, jobs=jobs or load_settings().jobs)
    click.echo(dump_matrix(matrix, fmt), nl=False)


@cli.command()
@click.argument('code')
@format_option
@limit_option
@jobs_option
@handle_errors
def ou(code, fmt, limit, jobs):
    """ou matrix U(P) = M(P)A."""
    matrix = ou_matrix(parse_projection(code), limit=limit, jobs=jobs or load_settings().jobs)
    click.echo(dump_matrix(matrix, fmt), nl=False)


@cli.command()
@click.argument('diagram')
@assignment_option
@format_option
@handle_errors
def incidence(diagram, assignment, fmt):
    """Warping incidence matrix m(D)."""
    matrix = incidence_matrix(parse_diagram_arg(diagram, assignment))
    click.echo(dump_matrix(matrix, fmt), nl=False)


@cli.command()
@click.argument('diagram')
@assignment_option
@format_option
@handle_errors
def sequence(diagram, assignment, fmt):
    """Warping degree sequence s(D)."""
    values = list(warping_degree_sequence(parse_diagram_arg(diagram, assignment)))
    if fmt == 'json':
        click.echo(json.dumps(values))
    elif fmt == 'csv':
        click.echo(','.join(str(v) for v in values))
    else:
        click.echo(' '.join(str(v) for v in values))


def echo_pairs(pairs, fmt):
    if fmt == 'json':
        click.echo(json.dumps([list(pair) for pair in pairs]))
        return
    separator = ',' if fmt == 'csv' else ' '
    for a, b in pairs:
        click.echo(f"{a}{separator}{b}")


@cli.command()
@click.argument('code')
@format_option
@handle_errors
def pairs(code, fmt):
    """Zero-sum column pairs of U(P), 1-based."""
    echo_pairs(column_pairs(ou_matrix(parse_projection(code))).pairs, fmt)


@cli.command()
@click.argument('code')
@click.option('--source', type=click.Choice(['projection', 'ou', 'incidence']),
              default='projection', show_default=True)
@assignment_option
@format_option
@handle_errors
def gauss(code, source, assignment, fmt):
    """Gauss diagram (chord pairs) recovered from CODE."""
    if source == 'projection':
        parsed = parse_code(code) if assignment is None else parse_diagram_arg(code, assignment)
        chords = gauss_diagram(parsed)
    elif source == 'ou':
        chords = gauss_diagram(ou_matrix(parse_projection(code)))
    else:
        chords = gauss_diagram(incidence_matrix(parse_diagram_arg(code, assignment)))
    echo_pairs(chords.pairs, fmt)


@cli.command()
@format_option
@handle_errors
def canon(fmt):
    """Canonical form of a matrix read from stdin."""
    click.echo(dump_matrix(canonical_form(read_stdin_matrix()), fmt), nl=False)


@cli.command()
@click.argument('code', required=False)
@click.option('--streaming', is_flag=True, help='Never materialize more than the accumulator basis.')
@jobs_option
@limit_option
@handle_errors
def rank(code, streaming, jobs, limit):
    """Exact rank of M(P), of M̄(D) for an annotated code, or of a matrix on stdin."""
    settings = load_settings()
    jobs = jobs or settings.jobs

    if code is None:
        matrix = read_stdin_matrix()
        if streaming:
            value = rank_exact(iter(matrix.tolist()), width=matrix.width, block_size=settings.block_size)
        else:
            value = rank_bareiss(matrix.tolist(), matrix.width)
        click.echo(value)
        return

    parsed = parse_code(code)
    projection = parsed.projection if isinstance(parsed, KnotDiagram) else parsed
    exclude = parsed.assignment_index if isinstance(parsed, KnotDiagram) else None

    if streaming:
        value = streaming_rank(projection, jobs=jobs, limit=limit, exclude=exclude).rank
    else:
        matrix = warping_matrix(projection, limit=limit, jobs=jobs)
        rows = matrix.rows
        if exclude is not None:
            rows = rows[np.arange(rows.shape[0]) != exclude]
        accumulator = RankAccumulator(matrix.width)
        accumulator.add_block(rows)
        value = accumulator.rank
    logger.info(f"rank of {'M̄' if exclude is not None else 'M'} for {render(parsed)}: {value}")
    click.echo(value)


@cli.command()
@click.option('--scope', type=click.Choice(Scope.ALL), default=Scope.CORPUS, show_default=True)
@click.option('--max-crossings', type=click.IntRange(min=1), default=4, show_default=True,
              help='Largest c for the exhaustive scope.')
@click.option('--n', 'count', type=click.IntRange(min=1), default=100, show_default=True,
              help='Number of random words.')
@click.option('--crossings', type=click.IntRange(min=1), default=8, show_default=True,
              help='Crossings per random word.')
@click.option('--diagrams-per-word', type=click.IntRange(min=1), default=4, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--lemma-trials', type=click.IntRange(min=0), default=1000, show_default=True)
@jobs_option
@click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default='text', show_default=True)
@click.option('--timings', is_flag=True, help='Include runtimes in the output.')
@click.option('--record', is_flag=True, help='Log the run in the database.')
@handle_errors
def verify(scope, max_crossings, count, crossings, diagrams_per_word, seed, lemma_trials,
           jobs, fmt, timings, record):
    """Verify every claim over a scope; exit 1 if any report fails."""
    verification_scope = VerificationScope(
        kind=scope,
        max_crossings=max_crossings,
        count=count,
        crossings=crossings,
        seed=seed,
        diagrams_per_word=diagrams_per_word,
        lemma_trials=lemma_trials,
    )
    jobs = jobs or load_settings().jobs

    if record:
        from app import create_app
        from src.services.run_log import record_run

        with create_app().app_context():
            reports = record_run(verification_scope, lambda: verify_all(verification_scope, jobs=jobs)).reports
    else:
        reports = verify_all(verification_scope, jobs=jobs)

    if fmt == 'json':
        click.echo(render_json_lines(reports, timings=timings), nl=False)
    else:
        click.echo(render_table(reports, timings=timings), nl=False)

    if not summarize(reports)['success']:
        sys.exit(ExitCode.VERIFICATION_FAILED)


@cli.command()
@click.option('--list', 'list_entries', is_flag=True, help='List the named projections.')
@click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default='text', show_default=True)
@handle_errors
def corpus(list_entries, fmt):
    """The built-in corpus of named projections."""
    if not list_entries:
        raise InputError("nothing to do; pass --list")
    entries = Corpus.default().describe()
    if fmt == 'json':
        click.echo(json.dumps(entries))
        return
    for entry in entries:
        click.echo(f"{entry['name']:<14} c={entry['crossings']}  {entry['code']}")


def main():
    cli(prog_name='warpmatrix')


if __name__ == '__main__':
    main()
