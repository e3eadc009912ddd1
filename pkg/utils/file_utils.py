import csv
from pathlib import Path
from typing import List, Tuple

from core.errors import DataError, MissingLabelError, ResourceFormatError
from models.triple import Triple

from utils.logger import logger


def _parse_label(raw: str, path: Path, line_number: int) -> int:
    value = raw.strip()
    if value not in ("0", "1"):
        raise ResourceFormatError(f"Label must be 0 or 1, got {raw!r}", path, line_number)
    return int(value)


def parse_triple_row(row: List[str], path: Path, line_number: int) -> Triple:
    """
    One CSV row -> Triple.

    Accepts "term1,term2,attribute,label" and the unlabeled 3-field variant.
    """
    if len(row) not in (3, 4):
        raise ResourceFormatError(f"Expected 3 or 4 fields, got {len(row)}", path, line_number)

    fields = [cell.strip() for cell in row]
    if not all(fields[:3]):
        raise ResourceFormatError("term1, term2 and attribute must be non-empty", path, line_number)

    label = _parse_label(fields[3], path, line_number) if len(fields) == 4 else None
    return Triple(fields[0], fields[1], fields[2], label)


def load_triples(file_path: Path, require_labels: bool = False) -> List[Triple]:
    """
    Load a task CSV (no header).

    Args:
        file_path: Path to the split file
        require_labels: Reject rows without a label

    Returns:
        Triples in file order

    Raises:
        ResourceFormatError: wrong field count, empty term, bad label
        MissingLabelError: require_labels and a 3-field row
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise DataError("Task file not found", file_path)

    triples: List[Triple] = []
    with open(file_path, "r", encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or not "".join(row).strip():
                continue
            triple = parse_triple_row(row, file_path, line_number)
            if require_labels and not triple.is_labeled:
                raise MissingLabelError("Row has no label", file_path, line_number)
            triples.append(triple)

    labeled = sum(t.is_labeled for t in triples)
    logger.info(
        f"Loaded {len(triples)} triples from {file_path.name} ({labeled} labeled)",
        source="FileLoader"
    )
    if not triples:
        logger.warning(f"{file_path.name} contains no triples", source="FileLoader")
    return triples


def read_commented_csv(file_path: Path) -> Tuple[List[str], List[Tuple[int, List[str]]]]:
    """
    Leading '#' lines and the row list of a CSV written by this toolkit.

    Returns:
        (comment lines without the '# ' prefix, [(line number, row)])
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise DataError("File not found", file_path)

    comments: List[str] = []
    rows: List[Tuple[int, List[str]]] = []
    with open(file_path, "r", encoding="utf-8", newline="") as f:
        lines = f.read().splitlines()

    for line_number, line in enumerate(lines, start=1):
        if line.startswith("#") and not rows:
            comments.append(line[1:].strip())
            continue
        if not line.strip():
            continue
        rows.append((line_number, next(csv.reader([line]))))
    return comments, rows


def load_predictions(file_path: Path) -> List[Triple]:
    """
    Read a predictions CSV back as triples whose label is the prediction.

    The header row "term1,term2,attribute,predicted" is required.
    """
    file_path = Path(file_path)
    _, rows = read_commented_csv(file_path)
    if not rows or [c.strip() for c in rows[0][1]] != ["term1", "term2", "attribute", "predicted"]:
        raise ResourceFormatError("Missing header 'term1,term2,attribute,predicted'", file_path, rows[0][0] if rows else None)

    predictions = []
    for line_number, row in rows[1:]:
        if len(row) != 4:
            raise ResourceFormatError(f"Expected 4 fields, got {len(row)}", file_path, line_number)
        predictions.append(parse_triple_row(row, file_path, line_number))

    logger.info(f"Loaded {len(predictions)} predictions from {file_path.name}", source="FileLoader")
    return predictions

