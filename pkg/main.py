import argparse
from typing import Any, Dict, List, Optional
import logging
import os
import sys

from config import (
    DEFAULT_OPTIMIZERS,
    DEFAULT_RUNS,
    DYNAMICS_C,
    DYNAMICS_CHI,
    SWEEP_SAMPLES,
)
from core import OPTIMIZER_NAMES, OscilswarmError, optimizer_config
from utils import get_logger, ensure_directories, set_log_level, parse_name_list, parse_float_list, default_seed


# === 参数类型校验（失败时 argparse 以退出码 2 结束） ===

def positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{s}'")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def non_negative_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got '{s}'")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got '{s}'")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def positive_float_list(s: str) -> List[float]:
    try:
        values = parse_float_list(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{s}'")
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected comma-separated positive numbers, got '{s}'")
    return values


def mutation_arg(s: str):
    """--de-f：单个 F，或 'lo,hi' 抖动区间。"""
    try:
        values = parse_float_list(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected F or 'lo,hi', got '{s}'")
    if len(values) == 1:
        return values[0]
    if len(values) == 2:
        return tuple(values)
    raise argparse.ArgumentTypeError(f"expected F or 'lo,hi', got '{s}'")


def name_list(choices):
    def parse(s: str) -> List[str]:
        names = parse_name_list(s)
        unknown = [n for n in names if n not in choices]
        if not names:
            raise argparse.ArgumentTypeError("expected at least one name")
        if unknown:
            raise argparse.ArgumentTypeError(f"unknown name(s): {', '.join(unknown)}; expected from {', '.join(choices)}")
        return names
    return parse


# === 子命令 ===

def optimizer_params(name: str, args) -> Dict[str, Any]:
    """从命令行收集某个优化器的参数；未给出的保持 None，由 config.py 默认值补齐。"""
    if name == "hopso":
        return dict(c1=args.c1, c2=args.c2, omega=args.omega, damping=args.lambda_, scale=args.s,
                    m=args.m, t_ul=args.t_ul, particles=args.particles)
    if name == "pso":
        return dict(chi=args.chi, c1=args.pso_c1, c2=args.pso_c2, particles=args.particles)
    if name == "de":
        return dict(population=args.de_pop, mutation=args.de_f, crossover=args.de_cr,
                    polish=False if args.de_no_polish else None)
    return {}


def build_configs(parser, names: List[str], args) -> list:
    configs = []
    for name in names:
        try:
            configs.append(optimizer_config(name, **optimizer_params(name, args)))
        except ValueError as e:
            parser.error(f"{name}: {e}")
    return configs


def check_function(parser, name: str, dimension: Optional[int]):
    from testbed import spec_for
    try:
        spec_for(name, dimension)
    except OscilswarmError as e:
        parser.error(str(e))


def cmd_run(args, parser) -> int:
    from harness import build_plan, execute_plan
    from report import save_results_csv

    logger = get_logger("cmd_run")
    check_function(parser, args.function, args.dim)
    configs = build_configs(parser, [args.optimizer], args)
    seed = default_seed(args.seed)
    plan = build_plan([args.function], configs, args.runs, seed,
                      dimensions={args.function: args.dim} if args.dim else None,
                      budgets={args.function: args.budget} if args.budget else None)
    result = execute_plan(plan, args.jobs)
    save_results_csv(result.results(), args.out)
    if result.failed:
        logger.error(f"{len(result.failed)} of {len(result.outcomes)} runs failed: {result.failed[0].message}")
        return 1
    return 0


def cmd_compare(args, parser) -> int:
    from harness import build_plan, execute_plan, merge_external
    from report import emit_table, save_results_csv, save_table

    logger = get_logger("cmd_compare")
    configs = build_configs(parser, args.optimizers, args)
    seed = default_seed(args.seed)
    budgets = {fn: args.budget for fn in args.functions} if args.budget else None
    plan = build_plan(args.functions, configs, args.runs, seed, budgets=budgets)
    result = execute_plan(plan, args.jobs)
    stats = result.stats
    if args.external:
        stats = merge_external(stats, args.external)

    if args.results_out:
        save_results_csv(result.results(), args.results_out)
    if args.out_table:
        save_table(stats, args.out_table, args.format)
    else:
        sys.stdout.write(emit_table(stats, args.format))
    if result.failed:
        logger.error(f"{len(result.failed)} of {len(result.outcomes)} runs failed")
        return 1
    return 0


def cmd_sweep(args, parser) -> int:
    from harness import scaling_factor_sweep
    from report import save_frame_csv

    logger = get_logger("cmd_sweep")
    check_function(parser, args.function, args.dim)
    params = optimizer_params("hopso", args)
    params = {k: v for k, v in params.items() if v is not None and k not in ("damping", "scale")}
    table, result = scaling_factor_sweep(args.function, args.s_values, args.runs, default_seed(args.seed),
                                         dimension=args.dim, budget=args.budget, jobs=args.jobs,
                                         hopso_params=params)
    save_frame_csv(table, args.out)
    for _, r in table.iterrows():
        logger.info(f"s={r['s']:g}: mean={r['mean']:.5g} median={r['median']:.5g}")
    return 1 if result.failed else 0


def cmd_dynamics(args, parser) -> int:
    from dynamics import figure2_sweep, random_product_trajectory, trajectory_frame
    from report import save_frame_csv

    logger = get_logger("cmd_dynamics")
    sweep = figure2_sweep(args.chi, args.c, args.samples)
    save_frame_csv(sweep, args.out)
    last = sweep.iloc[-1]
    logger.info(f"r=2: sigma1={last['sigma1']:.4f}, sigma2={last['sigma2']:.4f}")

    if args.trajectory_steps > 0:
        out_dir = os.path.dirname(os.path.abspath(args.out))
        base = default_seed(args.seed)
        for k in range(args.seeds):
            norms = random_product_trajectory(args.chi, args.c, args.c, args.trajectory_steps, base + k)
            save_frame_csv(trajectory_frame(norms), os.path.join(out_dir, f"trajectory_seed{base + k}.csv"))
    return 0


def cmd_list_functions(args, parser) -> int:
    from testbed import registry_table
    from report import save_frame_csv

    table = registry_table()
    sys.stdout.write(table.to_string(index=False) + "\n")
    if args.out:
        save_frame_csv(table, args.out)
    return 0


def cmd_plan(args, parser) -> int:
    from harness import execute_plan, load_plan
    from report import save_results_csv, save_table

    logger = get_logger("cmd_plan")
    try:
        plan, raw = load_plan(args.plan)
    except ValueError as e:
        parser.error(f"{args.plan}: {e}")
    jobs = args.jobs if args.jobs is not None else int(raw.get("jobs") or os.cpu_count() or 1)
    result = execute_plan(plan, jobs)
    results_path = args.out_results or plan.results_path
    stats_path = args.out_stats or plan.stats_path
    if results_path:
        save_results_csv(result.results(), results_path)
    if stats_path:
        save_table(result.stats, stats_path, args.format)
    if not results_path and not stats_path:
        from report import emit_table
        sys.stdout.write(emit_table(result.stats, args.format))
    if result.failed:
        logger.error(f"{len(result.failed)} of {len(result.outcomes)} runs failed")
        return 1
    return 0


def build_parser():
    from testbed import function_names

    functions = function_names()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="输出 DEBUG 级别日志")

    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=positive_int, default=os.cpu_count() or 1, help="并行进程数，默认为 CPU 核数")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--runs", type=positive_int, default=DEFAULT_RUNS, help="每个 (优化器, 函数) 的重复次数")
    seeded.add_argument("--seed", type=int, help="基础种子，第 k 次运行用 seed+k；缺省读 OSCILSWARM_SEED")

    opt = argparse.ArgumentParser(add_help=False)
    g = opt.add_argument_group("optimizer settings")
    g.add_argument("--c1", type=float, help="HOPSO 认知权重，默认 1")
    g.add_argument("--c2", type=float, help="HOPSO 社会权重，默认 1")
    g.add_argument("--omega", type=positive_float, help="HOPSO 角频率 ω")
    g.add_argument("--lambda", dest="lambda_", type=float, help="HOPSO 阻尼 λ（与 --s 二选一）")
    g.add_argument("--s", type=positive_float, help="HOPSO 缩放因子 s，λ = s·N/B")
    g.add_argument("--m", type=positive_float, help="HOPSO 振幅下限倍数 m")
    g.add_argument("--t-ul", dest="t_ul", type=positive_float, help="HOPSO 取样时间上限 t_ul")
    g.add_argument("--particles", type=positive_int, help="粒子数 N（HOPSO/PSO）")
    g.add_argument("--chi", type=positive_float, help="PSO 收缩因子 χ")
    g.add_argument("--pso-c1", dest="pso_c1", type=float, help="PSO 认知权重，默认 2.05")
    g.add_argument("--pso-c2", dest="pso_c2", type=float, help="PSO 社会权重，默认 2.05")
    g.add_argument("--de-pop", dest="de_pop", type=positive_int, help="DE 种群规模")
    g.add_argument("--de-f", dest="de_f", type=mutation_arg, help="DE 变异因子 F，或 'lo,hi' 抖动区间")
    g.add_argument("--de-cr", dest="de_cr", type=float, help="DE 交叉率 CR")
    g.add_argument("--de-no-polish", dest="de_no_polish", action="store_true", help="关闭 DE 结束后的 L-BFGS-B 细化")

    parser = argparse.ArgumentParser(description="HOPSO / PSO / DE 基准实验工具")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common, jobs, seeded, opt], help="单个优化器在单个函数上重复运行")
    p.add_argument("--optimizer", choices=OPTIMIZER_NAMES, required=True)
    p.add_argument("--function", choices=functions, required=True)
    p.add_argument("--dim", type=positive_int, help="维度（仅可变维度的函数）")
    p.add_argument("--budget", type=positive_int, help="评估预算，缺省按函数取 1000 或 10000")
    p.add_argument("--out", required=True, help="结果 CSV 路径")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("compare", parents=[common, jobs, seeded, opt], help="多个优化器 × 多个函数的对比表")
    p.add_argument("--functions", type=name_list(functions), default=list(functions), help="逗号分隔，默认全部 12 个")
    p.add_argument("--optimizers", type=name_list(OPTIMIZER_NAMES), default=list(DEFAULT_OPTIMIZERS), help="逗号分隔")
    p.add_argument("--budget", type=positive_int, help="统一的评估预算，缺省按函数默认值")
    p.add_argument("--format", choices=["csv", "json", "markdown"], default="csv")
    p.add_argument("--out-table", dest="out_table", help="统计表路径，缺省输出到标准输出")
    p.add_argument("--results-out", dest="results_out", help="另存逐次运行结果 CSV")
    p.add_argument("--external", action="append", default=[], help="外部结果 CSV（与结果 CSV 同表头），可重复")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("sweep", parents=[common, jobs, seeded, opt], help="HOPSO 缩放因子 s 扫描")
    p.add_argument("--function", choices=functions, required=True)
    p.add_argument("--s-values", dest="s_values", type=positive_float_list, required=True, help="逗号分隔的正数")
    p.add_argument("--dim", type=positive_int)
    p.add_argument("--budget", type=positive_int)
    p.add_argument("--out", required=True, help="每个 s 一行的统计 CSV")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("dynamics", parents=[common], help="动力学矩阵奇异值扫描与随机乘积轨迹")
    p.add_argument("--chi", type=positive_float, default=DYNAMICS_CHI)
    p.add_argument("--c", type=float, default=DYNAMICS_C)
    p.add_argument("--samples", type=positive_int, default=SWEEP_SAMPLES)
    p.add_argument("--trajectory-steps", dest="trajectory_steps", type=non_negative_int, default=0)
    p.add_argument("--seeds", type=positive_int, default=1, help="轨迹条数，种子依次为 seed, seed+1, ...")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="扫描 CSV 路径；轨迹 CSV 写在同一目录")
    p.set_defaults(handler=cmd_dynamics)

    p = sub.add_parser("list-functions", parents=[common], help="列出测试函数注册表")
    p.add_argument("--out", help="另存为 CSV")
    p.set_defaults(handler=cmd_list_functions)

    p = sub.add_parser("plan", parents=[common], help="执行 YAML 实验计划")
    p.add_argument("--plan", required=True, help="YAML 计划文件")
    p.add_argument("--jobs", type=positive_int, help="并行进程数，缺省取计划中的 jobs 或 CPU 核数")
    p.add_argument("--out-results", dest="out_results")
    p.add_argument("--out-stats", dest="out_stats")
    p.add_argument("--format", choices=["csv", "json", "markdown"], default="csv")
    p.set_defaults(handler=cmd_plan)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ensure_directories()
    logger = get_logger("main")
    if args.verbose:
        set_log_level(logging.DEBUG)

    if args.command == "dynamics" and args.samples < 2:
        parser.error("--samples must be >= 2")
    try:
        return args.handler(args, parser)
    except (OscilswarmError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except Exception:
        logger.exception(f"{args.command} failed")
        return 1


if __name__ == "__main__":
    sys.exit(main())
