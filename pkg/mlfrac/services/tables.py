"""Base-E_alpha(1) logarithm tables, the figure dataset, and output writers."""
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from mlfrac.models import OutputFormat, RunConfig, TableArtifact
from mlfrac.services.config import provenance
from mlfrac.services.mllog import make_log_context, ml_log, verify_proposition


TABLE1_ALPHAS: Tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
TABLE1_XS: Tuple[float, ...] = (
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0,
)
BASE_ROW = "E_alpha(1)"

# (x1, x2, alpha)
TABLE2_ROWS: Tuple[Tuple[float, float, float], ...] = (
    (0.2, 1.0, 0.1),
    (0.2, 1.0, 0.2),
    (0.2, 1.0, 0.3),
    (0.75, 0.35, 0.1),
    (0.75, 0.35, 0.5),
    (0.75, 0.35, 0.9),
    (0.81, 0.4, 0.2),
    (0.81, 0.4, 0.7),
    (0.81, 0.4, 0.8),
    (0.93, 0.5, 0.5),
    (2.0, 3.0, 0.6),
    (3.0, 5.0, 0.7),
    (6.0, 7.0, 0.8),
    (10.0, 2.0, 0.9),
)
TABLE2_COLUMNS = [
    "x1", "x2", "alpha",
    "log_product", "log_quotient", "log_x1", "log_x2", "log_sum", "log_difference",
]

FIGURE1_STEP = 0.05
FIGURE1_POINTS = 200

TABLE_FLOAT_FORMAT = "%.4f"
CURVE_FLOAT_FORMAT = "%.12g"


def log_row_label(x: float) -> str:
    return f"log({x:g})"


def build_table1(config: RunConfig) -> TableArtifact:
    """Base row E_alpha(1), then log_{E_alpha(1)}(x) for every tabulated x, one column per alpha."""
    ctrl = config.series_control()
    contexts = [make_log_context(alpha, ctrl) for alpha in TABLE1_ALPHAS]
    cells = [[ctx.base_value for ctx in contexts]]
    for x in TABLE1_XS:
        cells.append([ml_log(ctx, x) for ctx in contexts])
    return TableArtifact(
        name="table1",
        row_labels=[BASE_ROW] + [log_row_label(x) for x in TABLE1_XS],
        column_labels=[f"{alpha:g}" for alpha in TABLE1_ALPHAS],
        cells=cells,
        provenance="E_alpha(1), then log base E_alpha(1) of x; one column per alpha",
        row_header="alpha",
    )


def build_table2(config: RunConfig) -> TableArtifact:
    """One row per (x1, x2, alpha) example of the product and quotient rules."""
    ctrl = config.series_control()
    cells = []
    for x1, x2, alpha in TABLE2_ROWS:
        report = verify_proposition(alpha, x1, x2, ctrl)
        cells.append([
            x1, x2, alpha,
            report.log_product, report.log_quotient,
            report.log_x1, report.log_x2,
            report.log_sum, report.log_difference,
        ])
    return TableArtifact(
        name="table2",
        row_labels=[str(i) for i in range(1, len(TABLE2_ROWS) + 1)],
        column_labels=TABLE2_COLUMNS,
        cells=cells,
        provenance="product and quotient rules for log base E_alpha(1)",
    )


def figure1_xs() -> np.ndarray:
    return np.round(np.arange(1, FIGURE1_POINTS + 1) * FIGURE1_STEP, 10)


def build_figure1(config: RunConfig) -> pd.DataFrame:
    """Plot-ready long frame (x, alpha, log_value) for every tabulated alpha."""
    ctrl = config.series_control()
    xs = figure1_xs()
    frames = []
    for alpha in TABLE1_ALPHAS:
        ctx = make_log_context(alpha, ctrl)
        frames.append(pd.DataFrame({
            "x": xs,
            "alpha": alpha,
            "log_value": ml_log(ctx, xs),
        }))
    return pd.concat(frames, ignore_index=True)


def render(
    frame: pd.DataFrame,
    header: Dict[str, Any],
    output_format: OutputFormat,
    float_format: str,
) -> str:
    """
    Serialise a frame with its provenance.

    csv: '# key: value' lines, then a comma-delimited body with LF endings.
    structured: JSON object {provenance, columns, rows}.
    """
    if output_format == OutputFormat.STRUCTURED:
        body = json.loads(frame.to_json(orient="split", index=False, double_precision=15))
        document = {"provenance": header, "columns": body["columns"], "rows": body["data"]}
        return json.dumps(document, indent=2) + "\n"
    lines: List[str] = [f"# {key}: {value}" for key, value in header.items()]
    body = frame.to_csv(index=False, lineterminator="\n", float_format=float_format)
    return "\n".join(lines) + "\n" + body


def write_output(text: str, output_path: Optional[str]) -> Optional[Path]:
    """Write to `output_path`, or stdout when no path is configured."""
    if not output_path:
        sys.stdout.write(text)
        return None
    path = Path(output_path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def write_table(artifact: TableArtifact, config: RunConfig) -> Optional[Path]:
    header = provenance(config, table=artifact.name)
    if artifact.provenance:
        header["description"] = artifact.provenance
    text = render(artifact.to_frame(), header, config.output_format, TABLE_FLOAT_FORMAT)
    return write_output(text, config.output_path)


def write_frame(
    frame: pd.DataFrame,
    config: RunConfig,
    float_format: str = CURVE_FLOAT_FORMAT,
    **extra: Any,
) -> Optional[Path]:
    text = render(frame, provenance(config, **extra), config.output_format, float_format)
    return write_output(text, config.output_path)
