# File formats and exports for the sEMG toolchain
from .window_io import read_windows, write_windows, encode_windows, decode_windows, WindowFormatError
from .checkpoint import save_checkpoint, load_checkpoint, Checkpoint, CheckpointError
from .heatmap import write_attention_csv, write_attention_png, render_heatmap, HeatmapError, PIL_AVAILABLE
from .reports import (
    jsonable, write_json, write_confusion_csv, write_rows_csv, write_xlsx,
    eval_sheets, ablation_sheets, manifest_path, write_manifest
)
