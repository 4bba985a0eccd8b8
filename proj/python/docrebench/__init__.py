"""Python bindings for the docrebench document OCR evaluation toolkit."""

from ._core import (
    Document,
    DocumentScore,
    DocrebenchError,
    ExpectedOutcome,
    PerturbationSpec,
    SynthSpec,
    TextLevelScore,
    WordLevelScore,
    batch_sizes,
    bbox_of,
    cer,
    edit_distance,
    evaluate_files,
    evaluate_pair,
    f_measure,
    fit_font_size,
    generate_document,
    load_document,
    nfc,
    oracle_check,
    perturb,
    polygon_area,
    polygon_iou,
    reconstruct_html,
    save_document,
    validate_document,
    wer,
)
from ._core import __version__

__all__ = [
    "Document",
    "DocumentScore",
    "DocrebenchError",
    "ExpectedOutcome",
    "PerturbationSpec",
    "SynthSpec",
    "TextLevelScore",
    "WordLevelScore",
    "batch_sizes",
    "bbox_of",
    "cer",
    "edit_distance",
    "evaluate_files",
    "evaluate_pair",
    "f_measure",
    "fit_font_size",
    "generate_document",
    "load_document",
    "nfc",
    "oracle_check",
    "perturb",
    "polygon_area",
    "polygon_iou",
    "reconstruct_html",
    "save_document",
    "validate_document",
    "wer",
    "__version__",
]
