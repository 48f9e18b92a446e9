"""Word-level Bengali/English language identification for romanized
code-mixed text."""

from .corpus import Label, LabeledWord, generate_synthetic, normalize_word
from .encoder import Scheme, encode_char, encode_phonetic, pad_and_onehot
from .phonelib import default_library, load_library, lookup, validate_library

__version__ = "0.1.0"

__all__ = [
    "Label", "LabeledWord", "Scheme", "default_library", "encode_char", "encode_phonetic",
    "generate_synthetic", "load_library", "lookup", "normalize_word", "pad_and_onehot",
    "validate_library",
]
