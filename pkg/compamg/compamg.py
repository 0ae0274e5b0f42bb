import argparse
import sys
import numpy as np

from compamg.probgen import AnisotropyParams, gen_anisotropic_2d, gen_anisotropic_3d, gen_laplace
from compamg.sparse_core import load_matrix_market, write_matrix_market, check_csr, is_symmetric, \
 power_method, is_positive_definite
from compamg.smoothers import build_smoother, smoother_norm_bound
from compamg.coarsening import aggregate, modularity_graph, strength_graph, modularity_functional, \
 modularity_networkx, coarse_zero_rowsum_defect, write_aggregation
from compamg.composite import AdaptiveConfig, adaptive_build
from compamg.solve_drivers import stationary_solve, pcg_solve, compute_metrics, complexity_per_component
from compamg.generate_report import MakeReport, WriteJsonReport, WriteHistoryCsv
from compamg.utilities import GetCurrentTime, ReadConfig, GetParameter, ConvertArgToBool, CheckFilePath, \
 CreateOutputDir, ParseRange, SolverError
from compamg.version import __version__



"""
compamg.py - main interface for compamg
=======================================

Purpose
-------
compamg builds adaptive composite algebraic multigrid preconditioners:
slow-to-converge error of the current solver is exposed by a tester, a
smoothed aggregation hierarchy is built from it with modularity matching
coarsening and added as a new component of a symmetric composition.
"""


# parameters resolved from the command, the config file or the defaults:
# (section, key, cast)
PROBLEM_KEYS = [('PROBLEM', 'dim', int), ('PROBLEM', 'n', int), ('PROBLEM', 'epsilon', float),
                ('PROBLEM', 'theta', float), ('PROBLEM', 'phi', float), ('PROBLEM', 'laplace', ConvertArgToBool)]

PROBLEM_DEFAULTS = {'dim': 2, 'n': 32, 'epsilon': 1e-6, 'theta': 0.0, 'phi': 0.0, 'laplace': False}

ADAPTIVE_KEYS = [('target_rho', float), ('tester_iters', int), ('candidates', int), ('gamma', float),
                 ('mu', int), ('nu', int), ('max_components', int), ('coarse_size', int), ('seed', int),
                 ('ortho_period', int), ('fine_smoother', str), ('base_smoother', str),
                 ('skip_fine_smoothing', ConvertArgToBool), ('strength_combine', str), ('matching', str),
                 ('stall_threshold', float), ('stall_steps', int), ('omega', float)]

SOLVE_KEYS = [('SOLVE', 'mode', str), ('SOLVE', 'tol', float), ('SOLVE', 'max_iters', int)]

SOLVE_DEFAULTS = {'mode': 'both', 'tol': 1e-12, 'max_iters': 1000}

# largest matrix checked with a dense Cholesky factorization
DENSE_CHECK_SIZE = 500


def progress(quiet, message):
    if not quiet:
        print(GetCurrentTime() + message)


def resolve_adaptive(args, config):
    '''
    (argparse.Namespace, configparser.ConfigParser) -> AdaptiveConfig

    :param args: Parsed command line
    :param config: Parsed config file

    Return the build parameters. Values from the command have precedence over
    the config file, which has precedence over the defaults
    '''

    defaults = AdaptiveConfig()
    values = {}
    for key, cast in ADAPTIVE_KEYS:
        values[key] = GetParameter(config, 'ADAPTIVE', key, getattr(args, key, None), getattr(defaults, key), cast)
    hierarchy_keys = ['mu', 'nu', 'gamma', 'coarse_size', 'omega', 'fine_smoother', 'skip_fine_smoothing',
                      'strength_combine', 'matching']
    hierarchy = {key: values.pop(key) for key in hierarchy_keys}
    adaptive = AdaptiveConfig(**values, **hierarchy)
    adaptive.check()
    return adaptive


def resolve_section(args, config, keys, defaults):
    '''
    (argparse.Namespace, configparser.ConfigParser, list, dict) -> dict

    Return the parameters of keys resolved from the command, the config file and defaults
    '''

    return {key: GetParameter(config, section, key, getattr(args, key, None), defaults[key], cast) for section, key, cast in keys}


def generate_matrix(dim, n, epsilon, theta, phi, laplace):
    '''
    (int, int, float, float, float, bool) -> scipy.sparse.csr_matrix

    Return the anisotropic diffusion matrix (or the textbook Laplacian if laplace is True)
    '''

    if laplace:
        return gen_laplace(n, dim)
    if dim not in [2, 3]:
        raise ValueError('ERR: Diffusion problems are generated in 2 or 3 dimensions')
    p = AnisotropyParams(n, epsilon, theta, phi)
    return gen_anisotropic_2d(p) if dim == 2 else gen_anisotropic_3d(p)


def load_system(args, config):
    '''
    (argparse.Namespace, configparser.ConfigParser) -> (scipy.sparse.csr_matrix, dict)

    Return the system matrix read from the Matrix Market file given on the command,
    or generated from the problem parameters, and its description
    '''

    path = args.matrix_file if args.matrix_file is not None else args.matrix
    if path is not None:
        CheckFilePath([path])
        A = load_matrix_market(path)
        source = path
    else:
        problem = resolve_section(args, config, PROBLEM_KEYS, PROBLEM_DEFAULTS)
        A = generate_matrix(**problem)
        source = 'generated ' + ', '.join('{0}={1}'.format(key, problem[key]) for key in sorted(problem))
    if A.shape[0] != A.shape[1]:
        raise ValueError('ERR: Matrix must be square, found {0} x {1}'.format(*A.shape))
    return A, {'source': source, 'dim': int(A.shape[0]), 'nnz': int(A.nnz)}


def load_rhs(rhs, n):
    '''
    (str, int) -> numpy.ndarray

    :param rhs: 'const1' or path to a text file with one value per line
    :param n: Dimension of the system

    Return the right-hand side
    '''

    if rhs in [None, 'const1']:
        return np.ones(n)
    CheckFilePath([rhs])
    try:
        b = np.loadtxt(rhs, dtype=np.float64, ndmin=1)
    except ValueError:
        raise ValueError('ERR: Cannot parse right-hand side file {0}'.format(rhs))
    if b.shape != (n,):
        raise ValueError('ERR: Right-hand side has {0} entries, expected {1}'.format(b.size, n))
    return b


def generate_problem(outputfile, dim, n, epsilon, theta, phi, laplace, quiet):
    '''
    (str, int, int, float, float, float, bool, bool) -> None

    Write the generated matrix to outputfile in Matrix Market format
    '''

    progress(quiet, 'Generating matrix')
    A = generate_matrix(dim, n, epsilon, theta, phi, laplace)
    CreateOutputDir(outputfile)
    write_matrix_market(A, outputfile)
    progress(quiet, 'Wrote {0} x {0} matrix with {1} nonzeros to {2}'.format(A.shape[0], A.nnz, outputfile))


def build_solver(args, config, A):
    '''
    (argparse.Namespace, configparser.ConfigParser, scipy.sparse.csr_matrix) -> (CompositeSolver, BuildLog)

    Build the composite solver and write the aggregates of the first component
    if requested
    '''

    adaptive = resolve_adaptive(args, config)
    progress(args.quiet, 'Building composite solver (target rho {0}, at most {1} components)'.format(adaptive.target_rho, adaptive.max_components))
    C, log = adaptive_build(A, adaptive)
    for entry in log.entries:
        margin = 'n/a' if entry['theorem_margin'] is None else '{0:.4f}'.format(entry['theorem_margin'])
        progress(args.quiet, 'k = {0}: rho_B = {1:.6f}, near-null ratio = {2}'.format(entry['components'], entry['rho_b'], margin))
    progress(args.quiet, 'Stopped ({0}) with {1} components'.format(log.stop_reason, len(C)))
    progress(args.quiet, 'Symmetry defect {0:.2e} over {1} random pairs'.format(log.spd_check['symmetry_defect'], log.spd_check['pairs']))

    if getattr(args, 'aggregates', None) is not None:
        if len(C) == 0 or C.components[0].levels[0].aggregation is None:
            raise ValueError('ERR: The first component has no coarse level, no aggregates to write')
        CreateOutputDir(args.aggregates)
        write_aggregation(C.components[0].levels[0].aggregation, args.aggregates)
        progress(args.quiet, 'Wrote aggregates to {0}'.format(args.aggregates))
    return C, log


def build_command(args):
    '''
    (argparse.Namespace) -> None

    Build a composite solver and write its build log
    '''

    config = ReadConfig(args.config)
    A, info = load_system(args, config)
    progress(args.quiet, 'Loaded matrix of dimension {0} with {1} nonzeros'.format(info['dim'], info['nnz']))
    C, log = build_solver(args, config, A)
    if args.report is not None:
        WriteJsonReport(MakeReport('build', info, build_log=log.to_json()), args.report)
        progress(args.quiet, 'Wrote build log to {0}'.format(args.report))


def solve_command(args):
    '''
    (argparse.Namespace) -> None

    Build a composite solver and solve with the composites of the requested numbers
    of components as a stationary iteration and/or as a PCG preconditioner
    '''

    config = ReadConfig(args.config)
    A, info = load_system(args, config)
    settings = resolve_section(args, config, SOLVE_KEYS, SOLVE_DEFAULTS)
    if settings['mode'] not in ['stationary', 'pcg', 'both']:
        raise ValueError('ERR: Unknown solve mode {0}'.format(settings['mode']))
    modes = ['stationary', 'pcg'] if settings['mode'] == 'both' else [settings['mode']]
    b = load_rhs(args.rhs, A.shape[0])

    sweep = None if args.sweep is None else ParseRange(args.sweep)
    if sweep is not None:
        # the sweep builds its components regardless of the target factor
        args.max_components = max(sweep) if args.max_components is None else max(args.max_components, max(sweep))
        args.target_rho = min(1e-12, args.target_rho) if args.target_rho is not None else 1e-12
    C, log = build_solver(args, config, A)
    ks = [len(C)] if sweep is None else [k for k in sweep if k <= len(C)]
    if sweep is not None and len(ks) < len(sweep):
        progress(args.quiet, 'Only {0} components were built, sweep truncated'.format(len(C)))

    solves, metrics, reports = [], [], []
    for k in ks:
        composite = C.prefix(k)
        histories = {}
        for mode in modes:
            driver = stationary_solve if mode == 'stationary' else pcg_solve
            _, report = driver(A, composite, b, settings['tol'], settings['max_iters'])
            if k >= 1:
                report.complexity = complexity_per_component(composite)
            histories[mode] = report.residual_history
            solves.append(report.to_json())
            reports.append(report)
            progress(args.quiet, 'k = {0}, {1}: {2} iterations, relative residual {3:.3e}'.format(k, mode, report.iterations, report.residual_history[-1]))
        if k >= 1:
            metrics.append(compute_metrics(composite, histories))

    if args.report is not None:
        WriteJsonReport(MakeReport('solve', info, build_log=log.to_json(), solves=solves, metrics=metrics), args.report)
        progress(args.quiet, 'Wrote solve report to {0}'.format(args.report))
    if args.history is not None:
        WriteHistoryCsv(reports, args.history)
        progress(args.quiet, 'Wrote residual histories to {0}'.format(args.history))


def run_checks(A, seed=1, gamma=4.0):
    '''
    (scipy.sparse.csr_matrix, int, float) -> dict

    :param A: Matrix to check
    :param seed: Seed of the power method
    :param gamma: Coarsening factor of the test aggregation

    Return a dictionary of checks, each a dictionary with a 'passed' flag and
    the measured values
    '''

    checks = {}
    check_csr(A)
    checks['structure'] = {'passed': True}
    symmetric = is_symmetric(A)
    checks['symmetry'] = {'passed': symmetric, 'exact': symmetric,
                          'within_1e-12': is_symmetric(A, 1e-12 * abs(A).max())}
    diagonal = A.diagonal()
    checks['diagonal'] = {'passed': bool(np.all(diagonal > 0)), 'min': float(diagonal.min())}
    if not checks['diagonal']['passed'] or not symmetric:
        return checks

    norm_A, converged = power_method(A, seed=seed)
    checks['spectral_norm'] = {'passed': converged, 'estimate': norm_A}
    norm_B, c0 = smoother_norm_bound(build_smoother(A, 'l1_jacobi'), A)
    checks['l1_bound'] = {'passed': c0 >= 1 - 1e-6, 'norm_B': norm_B, 'c0': c0}

    ones = np.ones(A.shape[0])
    strength = strength_graph(A, ones)
    G = modularity_graph(strength)
    if G.total > 0:
        agg = aggregate(A, ones, gamma)
        coarse = G.coarsen(agg)
        defect = max([coarse_zero_rowsum_defect(coarse)] + agg.defects)
        modularity = {'passed': defect <= 1e-12 * G.total, 'zero_rowsum_defect': defect,
                      'aggregates': int(agg.n_agg), 'Q': modularity_functional(G, agg)}
        # networkx agrees when the graph has no self loops
        if np.all(G.adjacency.diagonal() == 0):
            modularity['Q_networkx'] = modularity_networkx(G, agg)
            modularity['passed'] = modularity['passed'] and abs(modularity['Q'] - modularity['Q_networkx']) <= 1e-10
        checks['modularity'] = modularity
    else:
        checks['modularity'] = {'passed': True, 'skipped': 'strength graph has no positive weight'}

    if A.shape[0] <= DENSE_CHECK_SIZE:
        checks['cholesky'] = {'passed': is_positive_definite(A)}
    return checks


def check_command(args):
    '''
    (argparse.Namespace) -> bool

    Run the check suite on the matrix and return True if every check passed
    '''

    config = ReadConfig(args.config)
    A, info = load_system(args, config)
    progress(args.quiet, 'Checking matrix of dimension {0} with {1} nonzeros'.format(info['dim'], info['nnz']))
    checks = run_checks(A, seed=args.seed if args.seed is not None else 1)
    for name in sorted(checks):
        progress(args.quiet, '{0}: {1}'.format(name, 'passed' if checks[name]['passed'] else 'FAILED'))
    passed = all(checks[name]['passed'] for name in checks)
    if args.report is not None:
        WriteJsonReport(MakeReport('check', info, checks=checks, passed=passed), args.report)
    return passed


def add_problem_arguments(parser):
    parser.add_argument('-d', '--dim', dest='dim', type=int, help='Space dimension of the generated problem')
    parser.add_argument('-n', '--n', dest='n', type=int, help='Number of cells per axis')
    parser.add_argument('-e', '--epsilon', dest='epsilon', type=float, help='Cross-direction diffusivity')
    parser.add_argument('-th', '--theta', dest='theta', type=float, help='Angle of the dominant direction in the xy plane (radians)')
    parser.add_argument('-ph', '--phi', dest='phi', type=float, help='Elevation of the dominant direction (radians, 3-D)')
    parser.add_argument('-lp', '--laplace', dest='laplace', action='store_const', const=True, help='Generate the textbook Laplacian instead')


def add_matrix_arguments(parser):
    parser.add_argument('matrix_file', nargs='?', help='Path to a Matrix Market file')
    parser.add_argument('-m', '--matrix', dest='matrix', help='Path to a Matrix Market file. The matrix is generated from the problem parameters if omitted')
    parser.add_argument('-c', '--config', dest='config', help='Path to the config file')
    parser.add_argument('-r', '--report', dest='report', help='Path to the json report')
    parser.add_argument('-q', '--quiet', dest='quiet', action='store_true', help='Do not print progress. Default is False, becomes True if used')
    add_problem_arguments(parser)


def add_build_arguments(parser):
    parser.add_argument('-tr', '--target-rho', dest='target_rho', type=float, help='Target convergence factor. Default is 0.9')
    parser.add_argument('-ti', '--tester-iters', dest='tester_iters', type=int, help='Number of tester iterations. Default is 20')
    parser.add_argument('-ns', '--candidates', dest='candidates', type=int, help='Number of near-null candidates per component. Default is 1')
    parser.add_argument('-g', '--gamma', dest='gamma', type=float, help='Coarsening factor. Default is 4')
    parser.add_argument('-mu', '--mu', dest='mu', type=int, help='Cycle parameter, 1 for V-cycles. Default is 1')
    parser.add_argument('-nu', '--nu', dest='nu', type=int, help='Pre- plus post-smoothing sweeps. Default is 2')
    parser.add_argument('-mc', '--max-components', dest='max_components', type=int, help='Maximum number of components. Default is 10')
    parser.add_argument('-cs', '--coarse-size', dest='coarse_size', type=int, help='Largest directly solved level. Default is 64')
    parser.add_argument('-s', '--seed', dest='seed', type=int, help='Seed of all random vectors. Default is 1')
    parser.add_argument('-fs', '--fine-smoother', dest='fine_smoother', help='Smoother of the finest level. Default is l1_jacobi')
    parser.add_argument('-sk', '--skip-fine-smoothing', dest='skip_fine_smoothing', action='store_const', const=True,
                        help='Do not smooth the finest interpolation. Default is False, becomes True if used')
    parser.add_argument('-cb', '--combine', dest='strength_combine', choices=['sum', 'max', 'first'], help='Combination of candidates in the strength graph. Default is sum')
    parser.add_argument('-mt', '--matching', dest='matching', choices=['maximal', 'single'], help='Matching rounds per coarsening step. Default is maximal')
    parser.add_argument('-a', '--aggregates', dest='aggregates', help='Path to a text file receiving the finest aggregates of the first component')


def get_parser():
    '''
    (None) -> argparse.ArgumentParser

    Return the command line parser
    '''

    parser = argparse.ArgumentParser(prog='compamg', description='Adaptive composite algebraic multigrid solvers')
    parser.add_argument('-v', '--version', action='version', version='%(prog)s {0}'.format(__version__))
    subparsers = parser.add_subparsers(help='sub-command help', dest='subparser_name')

    ## Problem generation command
    g_parser = subparsers.add_parser('gen', help='Generate an anisotropic diffusion matrix in Matrix Market format')
    add_problem_arguments(g_parser)
    g_parser.add_argument('-o', '--out', dest='out', help='Path to the output .mtx file', required=True)
    g_parser.add_argument('-c', '--config', dest='config', help='Path to the config file')
    g_parser.add_argument('-q', '--quiet', dest='quiet', action='store_true', help='Do not print progress. Default is False, becomes True if used')

    ## Build command
    b_parser = subparsers.add_parser('build', help='Build an adaptive composite solver and write its build log')
    add_matrix_arguments(b_parser)
    add_build_arguments(b_parser)

    ## Solve command
    s_parser = subparsers.add_parser('solve', help='Build a composite solver and solve a linear system with it')
    add_matrix_arguments(s_parser)
    add_build_arguments(s_parser)
    s_parser.add_argument('-b', '--rhs', dest='rhs', default='const1', help='Path to the right-hand side (one value per line) or const1. Default is const1')
    s_parser.add_argument('-md', '--mode', dest='mode', choices=['stationary', 'pcg', 'both'], help='Use the composite as a stationary iteration, as a PCG preconditioner or both. Default is both')
    s_parser.add_argument('-t', '--tol', dest='tol', type=float, help='Relative residual tolerance. Default is 1e-12')
    s_parser.add_argument('-mi', '--max-iters', dest='max_iters', type=int, help='Maximum number of iterations. Default is 1000')
    s_parser.add_argument('-k', '--components-sweep', dest='sweep',
                          help='Inclusive range first:last of component counts to solve with, eg. 1:10. Components are built up to last regardless of the target factor')
    s_parser.add_argument('-hs', '--history', dest='history', help='Path to the csv file with the residual histories')

    ## Check command
    c_parser = subparsers.add_parser('check', help='Run the invariant checks on a matrix')
    add_matrix_arguments(c_parser)
    c_parser.add_argument('-s', '--seed', dest='seed', type=int, help='Seed of the power method. Default is 1')
    return parser


def run_pipeline(argv=None):
    '''
    (list | None) -> int

    :param argv: Command line arguments. sys.argv[1:] if None

    Run the requested command and return the exit code: 0 on success, 1 on a
    solver failure, 2 on usage or input/output errors
    '''

    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        if args.subparser_name == 'gen':
            config = ReadConfig(args.config)
            problem = resolve_section(args, config, PROBLEM_KEYS, PROBLEM_DEFAULTS)
            generate_problem(args.out, quiet=args.quiet, **problem)
        elif args.subparser_name == 'build':
            build_command(args)
        elif args.subparser_name == 'solve':
            solve_command(args)
        elif args.subparser_name == 'check':
            if not check_command(args):
                print('ERR: matrix failed the checks', file=sys.stderr)
                return 1
        elif args.subparser_name is None:
            print(parser.format_help())
            return 2
    except SolverError as e:
        print('ERR: {0}'.format(e), file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(str(e), file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run_pipeline())


if __name__ == '__main__':
    main()
