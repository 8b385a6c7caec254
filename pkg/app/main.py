import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from app.cli import parse_cli
from app.config import setup_logging
from app.db.session import close_db
from app.routers import COMMANDS, CommandResult
from app.schemas import RunConfig
from app.utils.errors import LayerModelError
from app.utils.file_operations import canonical_json, render_csv, render_json, write_atomic, write_csv


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3


def _report_error(payload: dict) -> None:
    sys.stderr.write(canonical_json(payload) + "\n")


def _emit(run: RunConfig, result: CommandResult) -> None:
    """Render the result in the requested format to --output or stdout."""
    header = run.header()
    if result.written is not None:
        logger.info("Wrote %s", result.written)
        sys.stdout.write(render_json(header, result.payload))
        return

    if run.output_format == "csv" and result.columns is not None:
        text = render_csv(header, result.columns, result.rows or [])
    else:
        text = render_json(header, result.payload)
    if run.output is None:
        sys.stdout.write(text)
    else:
        write_atomic(run.output, text)
        logger.info("Wrote %s", run.output)

    for suffix, (columns, rows) in result.extra_csv.items():
        if run.output is None:
            logger.warning("No --output given; %s table not written", suffix)
            continue
        path = write_csv(run.output.with_name(f"{run.output.stem}_{suffix}.csv"), header, columns, rows)
        logger.info("Wrote %s", path)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the le-layers command; returns the process exit code."""
    try:
        run = parse_cli(argv)
    except LayerModelError as exc:
        setup_logging()
        logger.error("%s", exc.message)
        _report_error(exc.to_dict())
        return exc.exit_code

    setup_logging(run.payload.get("log_level"))
    logger.info("Running %s", run.command)

    try:
        result = COMMANDS[run.command](run)
        _emit(run, result)
    except LayerModelError as exc:
        logger.error("%s failed: %s", run.command, exc.message)
        _report_error(exc.to_dict())
        return exc.exit_code
    except ValidationError as exc:
        logger.error("%s: invalid input", run.command)
        errors = [
            {"type": error.get("type"), "loc": list(error.get("loc", ())), "msg": error.get("msg")}
            for error in exc.errors()
        ]
        _report_error({"error": "ValidationError", "message": f"{exc.error_count()} validation error(s)", "details": errors})
        return EXIT_INVALID
    finally:
        close_db()

    if result.failed:
        logger.error("%s reported failed checks", run.command)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
