"""Loop files, reports, the concrete oracle, benchmarks and the CLI."""

from .bench import BenchResult, BenchRow, bench, bundled_dir
from .oracle import (
    BUDGET, CYCLE, TERMINATED, OracleConfig, OracleResult, Outcome, classify,
    oracle_simulate,
)
from .parser import (
    LoopPath, LoopSpec, LoopSyntaxError, load_loop, parse_formula, parse_loop,
    parse_rel, parse_stateset, render_loop,
)
from .report import AnalysisConfig, Report, check_coherence, run_analysis

__all__ = [
    "AnalysisConfig", "BUDGET", "BenchResult", "BenchRow", "CYCLE", "LoopPath",
    "LoopSpec", "LoopSyntaxError", "OracleConfig", "OracleResult", "Outcome", "Report",
    "TERMINATED", "bench", "bundled_dir", "check_coherence", "classify", "load_loop",
    "oracle_simulate", "parse_formula", "parse_loop", "parse_rel", "parse_stateset",
    "render_loop", "run_analysis",
]
