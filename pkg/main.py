import argparse
import json
import logging
import sys
import time

from objprint import objstr

# src
from src.dataloader import branch_from_dict, config_from_dict, config_to_dict, give_config_file, give_json_file
from src.errors import ConfigParseError, DuValError
from src.eval import summarize, verify_paper
from src.utils import Logger, give_config, log_directory, same_seeds, setup_logging
# model
from src.models.branch_resolution import exceptional_strict, minus_two_components, resolve
from src.models.duval_planes import (build_branch, check_admissible, enumerate_classification, minus_two_candidates,
                                     surface_report, table_check)

logger = logging.getLogger('main')

EXIT_CHECKS_FAILED = 3


class JsonArgumentParser(argparse.ArgumentParser):
    """ flag errors become ConfigParseError (exit 1) instead of argparse's exit 2 """
    def error(self, message):
        raise ConfigParseError(f'{self.prog}: {message}', {'usage': self.format_usage().strip()})


def build_parser() -> argparse.ArgumentParser:
    parser = JsonArgumentParser(prog='duval', description='Du Val double planes: invariants, classification, checks')
    parser.add_argument('--config', default=None, help='run configuration (YAML), default config.yml')
    parser.add_argument('--workers', type=int, default=None, help='override runner.workers')
    sub = parser.add_subparsers(dest='command', parser_class=JsonArgumentParser)
    sub.required = True

    report = sub.add_parser('report', help='minimal-model invariants of a configuration file')
    report.add_argument('path')

    classify = sub.add_parser('classify', help='configurations with the given p_g, q (and K^2)')
    classify.add_argument('--pg', type=int, required=True)
    classify.add_argument('--q', type=int, required=True)
    classify.add_argument('--ksq', type=int, default=None)

    resolve_ = sub.add_parser('resolve', help='canonical resolution ledger of a configuration or raw branch')
    resolve_.add_argument('path')

    verify = sub.add_parser('verify-paper', help='run the regression catalog')
    verify.add_argument('--only', default=None, help='keep the records whose id starts with ONLY')
    return parser


def emit(payload):
    sys.stdout.write(json.dumps(payload, sort_keys=True, ensure_ascii=False) + '\n')
    sys.stdout.flush()


#%% commands
def cmd_report(args, config) -> int:
    duval = give_config_file(args.path)
    admissible = check_admissible(duval)
    for warning in admissible.warnings:
        logger.warning('%s: %s', duval, warning)
    emit(surface_report(duval).to_dict())
    return 0


def cmd_classify(args, config) -> int:
    results = enumerate_classification(args.pg, args.q, args.ksq, workers=config.runner.workers)
    check = table_check(args.pg, args.q, results, args.ksq)
    if not config.classify.warn_outside_table:
        check['warnings'] = []
    for warning in check['warnings']:
        logger.warning(warning)
    emit({'results': [{'config': config_to_dict(c), 'report': r.to_dict()} for c, r in results],
          'table_check': check})
    return 0


def cmd_resolve(args, config) -> int:
    raw = give_json_file(args.path)
    if isinstance(raw, dict) and raw.get('type') in ('B', 'D', 'Dn'):
        duval  = config_from_dict(raw)
        cover  = resolve(build_branch(duval))
        curves = minus_two_components(cover, minus_two_candidates(duval, cover))
    else:
        cover  = resolve(branch_from_dict(raw))
        curves = minus_two_components(cover, [exceptional_strict(cover, c) for c in cover.model.center_ids])
    emit({'surface': str(cover.model),
          'steps': [s.to_dict() for s in cover.steps],
          'smooth_branch': cover.smooth_class.to_list(),
          'half_class': cover.half_class.to_list(),
          'minus_two_curves': [c.to_list() for c in curves]})
    return 0


def cmd_verify_paper(args, config) -> int:
    start = time.perf_counter()
    records, warnings = verify_paper(workers=config.runner.workers, only=args.only, seed=config.runner.seed,
                                     samples=config.verify.property_samples, fail_fast=config.verify.fail_fast)
    summary = summarize(records)
    emit({'records': [r.to_dict() for r in records], 'warnings': warnings, 'summary': summary})
    logger.info('%d checks, %d failed in %.2fs', summary['checks'], len(summary['failed']), time.perf_counter() - start)
    return EXIT_CHECKS_FAILED if summary['failed'] else 0


COMMANDS = {
    'report': cmd_report,
    'classify': cmd_classify,
    'resolve': cmd_resolve,
    'verify-paper': cmd_verify_paper,
}


def main(argv=None) -> int:
    setup_logging()
    log = None
    try:
        args   = build_parser().parse_args(argv)
        config = give_config(args.config)
        if args.workers is not None:
            config.runner.workers = args.workers
        same_seeds(config.runner.seed)
        if config.runner.log_to_file:
            log = Logger(log_directory(config))
            setup_logging()
        print(objstr(config), file=sys.stderr, flush=True)
        return COMMANDS[args.command](args, config)
    except DuValError as e:
        sys.stderr.write(json.dumps(e.to_dict(), sort_keys=True, ensure_ascii=False, default=str) + '\n')
        return e.exit_code
    finally:
        if log is not None:
            log.close()
            setup_logging()


if __name__ == '__main__':
    sys.exit(main())
