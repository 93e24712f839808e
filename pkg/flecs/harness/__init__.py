from .config import SYNTHETIC, RunConfig, parse_config, load_config, save_config
from .driver import TRACE_COLUMNS, VARIANTS, TraceRow, load_dataset, build_shards, run, compare, bits_to_reach
from .trace import write_trace, write_comparison, save_csv, read_trace
from .selftest import CheckResult, check_compressor, check_error_feedback, check_operator_bounds, check_gradients
from .selftest import run_selftest
