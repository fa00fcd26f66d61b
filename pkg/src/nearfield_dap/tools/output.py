"""Shared CSV output for the tool layer."""

import asyncio
import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

from nearfield_dap.config import CSV_SCHEMA_VERSION
from nearfield_dap.services.figures import FigureData

logger = logging.getLogger(__name__)


async def write_result(
    result: dict[str, Any],
    rows: Sequence[Mapping[str, Any]],
    columns: Sequence[str],
    out: Path | None,
) -> dict[str, Any]:
    """Write rows to ``out`` if given and record the path in the result.

    Returns:
        The result with ``output_path`` and the CSV ``schema_version`` set,
        or an error dictionary if the file cannot be written
    """
    result["schema_version"] = CSV_SCHEMA_VERSION
    if out is None:
        result["output_path"] = None
        return result
    try:
        await asyncio.to_thread(FigureData.write_rows, rows, columns, out)
    except OSError as e:
        logger.error(f"[Near-field DAP] Cannot write {out}: {e}")
        return {"error": f"cannot write output {out}: {e}"}
    logger.info(f"[Near-field DAP] Wrote {len(rows)} rows to {out}")
    result["output_path"] = str(out)
    return result
