import csv
import io
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from dotenv import dotenv_values

from errors import DomainError


def parse_key_value_text(text: str) -> Dict[str, str]:
    """
    Parse a flat key-value text block into a dictionary.

    Accepts the same layout as config files and field descriptors:

    kind = tiling
    theta0 = 1.0471975511965976
    n = 4

    Blank lines and `#` comments are skipped, keys are lower-cased, and
    surrounding quotes are stripped from values.
    """
    parsed = dotenv_values(stream=io.StringIO(text))
    result = {}
    for key, value in parsed.items():
        if value is None:
            raise DomainError(f"missing value for key '{key}'")
        result[key.strip().lower()] = value.strip()
    return result


def read_key_value_file(path: Path) -> Dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise DomainError(f"config file {path} does not exist")
    return parse_key_value_text(path.read_text(encoding="utf-8"))


def format_key_value_text(values: Dict[str, Any]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in values.items())


def parse_float_list(text: str) -> List[float]:
    """Comma separated floats; an empty string is an empty list."""
    items = [item.strip() for item in text.split(",")]
    try:
        return [float(item) for item in items if item]
    except ValueError as e:
        raise DomainError(f"cannot parse float list {text!r}: {e}") from e


def parse_int_list(text: str) -> List[int]:
    items = [item.strip() for item in text.split(",")]
    try:
        return [int(item) for item in items if item]
    except ValueError as e:
        raise DomainError(f"cannot parse integer list {text!r}: {e}") from e


def read_theta_grid(path: Path) -> List[float]:
    """
    Read a theta grid file: one value per line, or a CSV whose first column
    holds the values (an optional `theta0` header is skipped).
    """
    thetas = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if not row or not row[0].strip() or row[0].strip().startswith("#"):
                continue
            cell = row[0].strip()
            if cell.lower() == "theta0":
                continue
            try:
                thetas.append(float(cell))
            except ValueError as e:
                raise DomainError(f"{path}: cannot parse theta value {cell!r}") from e
    return thetas


def format_number(value: float) -> str:
    """Shortest round-trip repr, with `inf`/`-inf` spelled out."""
    if value == float("inf"):
        return "inf"
    if value == float("-inf"):
        return "-inf"
    return repr(float(value))


def write_csv_rows(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    out: Optional[Path] = None,
    comments: Sequence[str] = (),
) -> str:
    """Write a CSV table (header always present) to `out` or stdout and return the text."""
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    text = buffer.getvalue()

    if out is None:
        sys.stdout.write(text)
    else:
        out = Path(out)
        with open(out, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    return text
