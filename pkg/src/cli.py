#!/usr/bin/env python3
"""
Command Line Interface for the hypergraph absorption toolkit
"""

import csv
import sys
import json
import time
import argparse
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from tqdm import tqdm

from src.audit.pseudo_random import audit_jumbled, audit_pseudo_random, density_floor_check
from src.audit.spectral import estimate_second_eigenvalue
from src.core.config import config
from src.core.errors import (BudgetExceededError, CertificateError, DivisibilityError, HypergraphError,
                             PhaseFailure, TemplateConstructionError)
from src.core.hypergraph import Hypergraph, RootedMotif, edge_density, format_hg, read_hg, write_hg
from src.core.models import (ExperimentRow, ExperimentSpec, GenSpec, PipelineConfig, PseudoParams,
                             SpanningCertificate)
from src.core.utils import setup_logging
from src.pipeline.drivers import (divisible, find_f_factor, find_loose_hamilton_cycle, find_perfect_matching,
                                  verify_certificate)
from src.structures.absorbers import (absorber_degeneracy, absorber_summary, build_factor_absorber,
                                      build_path_absorber, verify_factor_absorber, verify_path_absorber)
from src.structures.degeneracy import brute_force_degeneracy, edge_degeneracy, min_max_edge_degree
from src.structures.generators import motif as named_motif
from src.structures.generators import random_kgraph
from src.structures.templates import build_template, template_to_json, verify_flexibility

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

CSV_FIELDS = ["n", "p", "seed", "status", "success", "seconds", "certificate_size", "route",
              "audit_verdict", "audit_error", "phase_seconds", "message"]


def _write_json(path: Optional[str], data: Dict[str, Any]):
    if not path:
        return
    Path(path).write_text(json.dumps(data, indent=2, default=str))
    print(f"💾 Saved JSON to: {path}")


def load_motif(name: str, k: int, size: Optional[int] = None) -> Hypergraph:
    """A motif file in .hg format, or a name from the motif library"""
    if Path(name).is_file():
        return read_hg(name)
    return named_motif(name, k, size).graph


TUNABLES = ("p", "template_m", "gamma", "beta", "alpha_frac", "c", "eps")


def _pipeline_config(args, names=TUNABLES) -> PipelineConfig:
    values = {"seed": args.seed, "mode": args.mode, "greedy_first": args.greedy}
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return PipelineConfig(**values)


# ------------------------------------------------------------------ commands


def cmd_gen(args) -> int:
    H = random_kgraph(GenSpec(k=args.k, n=args.n, p=args.p, seed=args.seed))
    comment = f"random k-graph k={args.k} n={args.n} p={args.p} seed={args.seed}"
    if args.output:
        write_hg(H, args.output, comment)
        print(f"✅ {H} written to {args.output}")
    else:
        sys.stdout.write(format_hg(H, comment))
    return EXIT_OK


def cmd_audit(args) -> int:
    H = read_hg(args.input)
    p = args.p if args.p is not None else edge_density(H)
    if args.criterion == "jumbled":
        report = audit_jumbled(H, p, args.beta, mode=args.audit_mode, trials=args.trials, seed=args.seed)
    else:
        params = PseudoParams(p=p, alpha=args.alpha, eps=args.eps)
        report = audit_pseudo_random(H, params, mode=args.audit_mode, trials=args.trials, seed=args.seed)

    print(f"🔍 {report.criterion} audit ({report.mode}, {report.trials} trials): {report.verdict}")
    print(f"   worst error: {report.worst_error:.6g}")
    if report.verdict == "fail":
        print(f"   witness sizes: {[len(s) for s in report.worst_sets]}")
        print(f"   count {report.worst_count} vs expected {report.worst_expected:.6g}")
    data = report.model_dump()
    if args.floor_ell is not None:
        floor = density_floor_check(H, args.eps, args.floor_ell)
        print(f"   density floor: independent set {floor.independent_set_size}, "
              f"threshold {floor.threshold:.6g}, refuted={floor.refuted}")
        data["density_floor"] = floor.model_dump()
    _write_json(args.json, data)
    return EXIT_FAIL if report.verdict == "fail" else EXIT_OK


def cmd_spectral(args) -> int:
    H = read_hg(args.input)
    report = estimate_second_eigenvalue(H, iterations=args.iterations, restarts=args.restarts, seed=args.seed)
    print(f"lambda1={report.lambda1:.10g}")
    print(f"lambda2={report.lambda2:.10g}")
    if report.exact_lambda2 is not None:
        print(f"exact_lambda1={report.exact_lambda1:.10g}")
        print(f"exact_lambda2={report.exact_lambda2:.10g}")
    print(f"converged={report.converged}")
    _write_json(args.json, report.model_dump())
    return EXIT_OK


def cmd_degen(args) -> int:
    if args.input:
        F = read_hg(args.input)
        base = RootedMotif(F)
    else:
        base = named_motif(args.motif, args.k, args.edges)
        F = base.graph
    roots = list(args.roots or [])
    if args.root_ends:
        if base.ends is None:
            raise HypergraphError("--root-ends needs a motif with distinguished ends")
        roots = list(base.ends)
    M = RootedMotif(F, tuple(roots))
    degen, exposure = edge_degeneracy(M)
    low, high = min_max_edge_degree(F)
    print(f"degen={degen}")
    print(f"min_edge_degree={low}")
    print(f"max_edge_degree={high}")
    print(f"exposure={' '.join(str(e) for e in exposure.order)}")
    data = {"degen": degen, "min_edge_degree": low, "max_edge_degree": high,
            "exposure": exposure.order, "weights": exposure.weights, "roots": roots}
    if args.brute_force:
        exact = brute_force_degeneracy(M)
        print(f"brute_force={exact}")
        data["brute_force"] = exact
    _write_json(args.json, data)
    return EXIT_OK


def cmd_absorber(args) -> int:
    if args.kind == "path":
        absorber = build_path_absorber(args.k)
        ok, violations = verify_path_absorber(absorber)
    else:
        absorber = build_factor_absorber(load_motif(args.motif, args.k, args.size))
        ok, violations = verify_factor_absorber(absorber)
    G = absorber.motif.graph
    degen = absorber_degeneracy(absorber)
    print(f"{'✅' if ok else '❌'} {args.kind} absorber: {G.n} vertices, {G.num_edges} edges, degen={degen}")
    for v in violations:
        print(f"   • {v}")
    if args.output:
        write_hg(G, args.output, f"{args.kind} absorber k={args.k}")
    data = absorber_summary(absorber)
    data.update({"degen": degen, "valid": ok, "violations": violations})
    _write_json(args.json, data)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_template(args) -> int:
    T = build_template(args.r, args.m, seed=args.seed, degree_cap=args.degree_cap, retries=args.retries)
    report = verify_flexibility(T, mode=args.verify, trials=args.trials, seed=args.seed, progress=True)
    print(f"{'✅' if report.verdict == 'pass' else '❌'} ({args.r},{args.m})-template: "
          f"{T.num_vertices} vertices, {T.num_edges} edges, max degree {T.max_degree}")
    print(f"   flexibility: {report.verdict} ({report.mode}, {report.tested} removals)")
    data = template_to_json(T)
    data["flexibility"] = report.model_dump()
    _write_json(args.json, data)
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def solve(task: str, H: Hypergraph, cfg: PipelineConfig, F: Optional[Hypergraph] = None) -> SpanningCertificate:
    if task == "matching":
        return find_perfect_matching(H, cfg)
    if task == "hamcycle":
        return find_loose_hamilton_cycle(H, cfg)
    if F is None:
        raise HypergraphError("factor task needs --motif")
    return find_f_factor(H, F, cfg)


def cmd_solve(args) -> int:
    H = read_hg(args.input)
    cfg = _pipeline_config(args)
    F = load_motif(args.motif, H.k, args.size) if args.task == "factor" else None
    try:
        cert = solve(args.task, H, cfg, F)
    except (PhaseFailure, CertificateError, TemplateConstructionError) as e:
        print(f"❌ {args.task} failed: {e}")
        _write_json(args.json, {"kind": args.task, "verified": False, "error": str(e),
                                "phase": getattr(e, "phase", None)})
        return EXIT_FAIL
    print(f"✅ {cert.kind}: {len(cert.pieces)} pieces, route {cert.route}, verified={cert.verified}")
    for name, seconds in sorted(cert.phase_seconds.items()):
        print(f"   {name}: {seconds:.3f}s")
    _write_json(args.json, cert.model_dump())
    return EXIT_OK


def cmd_verify(args) -> int:
    H = read_hg(args.input)
    cert = SpanningCertificate.model_validate_json(Path(args.certificate).read_text())
    F = load_motif(args.motif, H.k, args.size) if args.motif else None
    ok, violations = verify_certificate(H, cert, F)
    print(f"{'✅ valid' if ok else '❌ invalid'} {cert.kind} certificate")
    for v in violations:
        print(f"   • {v}")
    _write_json(args.json, {"valid": ok, "violations": violations})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- experiments


def run_grid_point(spec: ExperimentSpec, index: int) -> ExperimentRow:
    """One grid point; failures become rows"""
    point = spec.grid[index]
    row = ExperimentRow(n=point.n, p=point.p, seed=point.seed, status="ok", success=False)
    F = None
    if spec.task == "factor":
        if spec.motif is None:
            row.status, row.message = "error", "factor task needs a motif"
            return row
        F = load_motif(spec.motif, spec.k)
    if not divisible(spec.task, point.n, spec.k, F.n if F is not None else None):
        row.status = "skipped: divisibility"
        return row

    start = time.perf_counter()
    try:
        H = random_kgraph(GenSpec(k=spec.k, n=point.n, p=point.p, seed=point.seed))
        if spec.task == "audit":
            params = PseudoParams(p=max(point.p, 1e-12), alpha=spec.audit_alpha, eps=spec.audit_eps)
            report = audit_pseudo_random(H, params, trials=spec.audit_trials, seed=point.seed, workers=1)
            row.audit_verdict, row.audit_error = report.verdict, report.worst_error
            row.success = report.verdict != "fail"
        else:
            cfg = spec.pipeline.model_copy(update={"seed": point.seed})
            cert = solve(spec.task, H, cfg, F)
            row.success = cert.verified
            row.certificate_size = len(cert.pieces)
            row.route = cert.route
            row.phase_seconds = cert.phase_seconds
    except (PhaseFailure, CertificateError, TemplateConstructionError, BudgetExceededError,
            HypergraphError, DivisibilityError) as e:
        row.status = f"failed: {getattr(e, 'phase', type(e).__name__)}"
        row.message = str(e)
    row.seconds = time.perf_counter() - start
    return row


def experiment(spec: ExperimentSpec, workers: Optional[int] = None, progress: bool = False) -> List[ExperimentRow]:
    """Rows in grid order; grid points run in a process pool capped by HPR_THREADS"""
    workers = max(1, min(workers or config.threads, config.threads))
    indices = range(len(spec.grid))
    if workers == 1:
        rows = [run_grid_point(spec, i) for i in tqdm(indices, disable=not progress, desc=spec.task)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(tqdm(pool.map(run_grid_point, [spec] * len(spec.grid), indices),
                             total=len(spec.grid), disable=not progress, desc=spec.task))
    ok = sum(1 for r in rows if r.success)
    logger.info(f"✅ Experiment {spec.task}: {ok}/{len(rows)} successful grid points")
    return rows


def write_rows(rows: List[ExperimentRow], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            data = row.model_dump()
            data["phase_seconds"] = json.dumps({k: round(v, 6) for k, v in sorted(row.phase_seconds.items())})
            writer.writerow({name: data[name] for name in CSV_FIELDS})
    return path


def cmd_experiment(args) -> int:
    if args.spec:
        spec = ExperimentSpec.model_validate_json(Path(args.spec).read_text())
    else:
        spec = ExperimentSpec.from_axes(args.task, args.n, args.p, args.seeds, k=args.k, motif=args.motif,
                                        output=args.output or config.output_dir,
                                        pipeline=_pipeline_config(args, ("template_m",)), audit_trials=args.trials)
    rows = experiment(spec, workers=args.workers, progress=True)
    path = write_rows(rows, Path(spec.output) / f"experiment_{spec.task}.csv")
    for row in rows:
        print(f"n={row.n} p={row.p} seed={row.seed} status={row.status} success={row.success}")
    print(f"💾 {len(rows)} rows written to {path}")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_pipeline_args(parser):
    parser.add_argument("--mode", choices=["strict", "pragmatic"], default="pragmatic", help="Constant regime")
    parser.add_argument("--greedy", action="store_true", help="Try plain greedy covering first")
    parser.add_argument("--p", type=float, help="Density used by the pipeline (default: edge density)")
    parser.add_argument("--template-m", type=int, help="Template scale m in pragmatic mode")
    parser.add_argument("--gamma", type=float, help="Small-set fraction")
    parser.add_argument("--beta", type=float, help="Template fraction")
    parser.add_argument("--alpha-frac", type=float, help="Reserve fraction")
    parser.add_argument("--c", type=float, help="Degree constant")
    parser.add_argument("--eps", type=float, help="Pseudo-randomness error")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hpr", description="Hypergraph absorption toolkit")
    parser.add_argument("--log-level", default=None, help="Override HPR_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    gen = subparsers.add_parser("gen", help="Generate a seeded random k-graph")
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", help="Output .hg file (default: stdout)")

    audit = subparsers.add_parser("audit", help="Audit pseudo-randomness or jumbledness")
    audit.add_argument("-i", "--input", required=True)
    audit.add_argument("--criterion", choices=["pseudo_random", "jumbled"], default="pseudo_random")
    audit.add_argument("--p", type=float, help="Density (default: edge density)")
    audit.add_argument("--alpha", type=float, default=0.1)
    audit.add_argument("--eps", type=float, default=0.2)
    audit.add_argument("--beta", type=float, default=1.0)
    audit.add_argument("--audit-mode", choices=["exhaustive", "sampled"], default="sampled")
    audit.add_argument("--trials", type=int, default=200)
    audit.add_argument("--floor-ell", type=int, help="Also run the independent-set density floor check")
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--json", help="Write the report as JSON")

    spectral = subparsers.add_parser("spectral", help="Estimate the second eigenvalue")
    spectral.add_argument("-i", "--input", required=True)
    spectral.add_argument("--iterations", type=int, default=500)
    spectral.add_argument("--restarts", type=int, default=20)
    spectral.add_argument("--seed", type=int, default=0)
    spectral.add_argument("--json")

    degen = subparsers.add_parser("degen", help="Edge degeneracy of a motif")
    degen.add_argument("--motif", default="single_edge")
    degen.add_argument("-i", "--input", help="Motif .hg file instead of a library name")
    degen.add_argument("--k", type=int, default=3)
    degen.add_argument("--edges", type=int, help="Motif size (edges) for sized library motifs")
    degen.add_argument("--roots", type=int, nargs="+", help="Root vertices")
    degen.add_argument("--root-ends", action="store_true", help="Root the two ends of a path motif")
    degen.add_argument("--brute-force", action="store_true", help="Cross-check by exhaustive search")
    degen.add_argument("--seed", type=int, default=0)
    degen.add_argument("--json")

    absorber = subparsers.add_parser("absorber", help="Build and verify an absorber")
    absorber.add_argument("kind", choices=["factor", "path"])
    absorber.add_argument("--k", type=int, default=3)
    absorber.add_argument("--motif", default="single_edge")
    absorber.add_argument("--size", type=int)
    absorber.add_argument("-o", "--output", help="Absorber .hg file")
    absorber.add_argument("--seed", type=int, default=0)
    absorber.add_argument("--json", help="JSON sidecar with roots, ends and witnesses")

    template = subparsers.add_parser("template", help="Build and verify an (r, m)-template")
    template.add_argument("--r", type=int, required=True)
    template.add_argument("--m", type=int, required=True)
    template.add_argument("--seed", type=int, default=0)
    template.add_argument("--degree-cap", type=int, default=40)
    template.add_argument("--retries", type=int, default=25)
    template.add_argument("--verify", choices=["exhaustive", "sampled"], help="Default: exhaustive when small")
    template.add_argument("--trials", type=int, default=200)
    template.add_argument("--json")

    solve_p = subparsers.add_parser("solve", help="Find and verify a spanning structure")
    solve_p.add_argument("task", choices=["matching", "factor", "hamcycle"])
    solve_p.add_argument("-i", "--input", required=True)
    solve_p.add_argument("--motif", default="single_edge")
    solve_p.add_argument("--size", type=int)
    solve_p.add_argument("--seed", type=int, default=0)
    solve_p.add_argument("--json", help="Write the certificate as JSON")
    _add_pipeline_args(solve_p)

    verify = subparsers.add_parser("verify", help="Verify a certificate against a hypergraph")
    verify.add_argument("-i", "--input", required=True)
    verify.add_argument("-c", "--certificate", required=True)
    verify.add_argument("--motif")
    verify.add_argument("--size", type=int)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--json")

    exp = subparsers.add_parser("experiment", help="Run a grid of solves or audits and write CSV")
    exp.add_argument("task", nargs="?", choices=["matching", "factor", "hamcycle", "audit"], default="matching")
    exp.add_argument("--spec", help="ExperimentSpec JSON file (overrides the grid flags)")
    exp.add_argument("--k", type=int, default=3)
    exp.add_argument("--n", type=int, nargs="+", default=[60])
    exp.add_argument("--p", type=float, nargs="+", default=[0.5])
    exp.add_argument("--seeds", type=int, nargs="+", default=[0])
    exp.add_argument("--motif")
    exp.add_argument("--trials", type=int, default=200)
    exp.add_argument("--workers", type=int, help="Parallel grid points (capped by HPR_THREADS)")
    exp.add_argument("--output", help="Output directory")
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--mode", choices=["strict", "pragmatic"], default="pragmatic")
    exp.add_argument("--greedy", action="store_true")
    exp.add_argument("--template-m", type=int)
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "audit": cmd_audit,
    "spectral": cmd_spectral,
    "degen": cmd_degen,
    "absorber": cmd_absorber,
    "template": cmd_template,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch, and map outcomes to exit codes 0 / 1 / 2"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    if not args.command:
        parser.print_help()
        return EXIT_USAGE
    if args.log_level:
        logging.getLogger().setLevel(args.log_level.upper())

    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        print(f"❌ Invalid parameters: {e}")
        return EXIT_USAGE
    except (HypergraphError, DivisibilityError, FileNotFoundError) as e:
        print(f"❌ Error: {e}")
        return EXIT_USAGE
    except (PhaseFailure, CertificateError, TemplateConstructionError, BudgetExceededError) as e:
        print(f"❌ Failed: {e}")
        return EXIT_FAIL


def main():
    setup_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
