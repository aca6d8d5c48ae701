"""
Report Writers

JSON, CSV and xlsx exports for evaluation, ablation and baseline reports,
training history and run manifests.
"""

import json
import math
import os

import numpy as np
import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Font


def jsonable(value):
    """Convert numpy scalars/arrays to plain Python; NaN and Inf become None."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(payload, path):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(jsonable(payload), f, indent=2, sort_keys=True)
        f.write('\n')


def write_confusion_csv(confusion, path):
    """Rows are true labels, columns predicted labels."""
    confusion = np.asarray(confusion, dtype=np.int64)
    labels = range(confusion.shape[0])
    frame = pd.DataFrame(
        confusion,
        index=pd.Index(list(labels), name='true'),
        columns=[f'pred{k}' for k in labels],
    )
    frame.to_csv(path, lineterminator='\n')


def write_rows_csv(rows, path, columns=None):
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')


def write_xlsx(sheets, path):
    """
    Write one worksheet per entry.

    Args:
        sheets: mapping of sheet title to (header, rows)
    """
    workbook = Workbook()
    workbook.remove(workbook.active)
    for title, (header, rows) in sheets.items():
        sheet = workbook.create_sheet(title=title[:31])
        sheet.append(list(header))
        for cell in sheet[1]:
            cell.font = Font(bold=True)
        for row in rows:
            sheet.append([jsonable(v) for v in row])
    workbook.save(path)


def eval_sheets(report):
    metrics = [
        ('accuracy', report.accuracy),
        ('balanced_accuracy', report.balanced_accuracy),
        ('mcc', report.mcc),
        ('trials', report.trials),
    ]
    labels = list(range(report.num_classes))
    confusion_rows = [[k] + report.confusion[k].tolist() for k in labels]
    return {
        'Metrics': (('metric', 'value'), metrics),
        'Confusion': (['true \\ pred'] + labels, confusion_rows),
    }


def ablation_sheets(rows):
    records = [row.to_dict() for row in rows]
    header = list(records[0]) if records else ['name']
    return {'Ablation': (header, [[r[h] for h in header] for r in records])}


def manifest_path(output):
    """manifest.json inside a directory output, <output>.manifest.json beside a file."""
    output = str(output)
    if os.path.isdir(output):
        return os.path.join(output, 'manifest.json')
    return output + '.manifest.json'


def write_manifest(manifest, output):
    path = manifest_path(output)
    write_json(manifest.to_dict(), path)
    return path
