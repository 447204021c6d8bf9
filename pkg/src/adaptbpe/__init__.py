"""Byte-level BPE and AdaptBPE tokenization with domain-vocabulary tooling."""

from .adaptbpe_engine import (
    AdaptBPETokenizer,
    InitSegmentation,
    adapt_encode,
    adapt_encode_word,
    adapt_initialize,
    longest_substr,
)
from .bpe_engine import BPETokenizer, TokenSequence, decode, decode_bytes, encode, encode_word, train_bpe
from .matching import MatchIndex
from .metrics import DiffReport, FragmentReport, compare, fragment_score, oov_rate
from .pretokenizer import PreToken, byte_decode, byte_encode, pre_tokenize
from .vocab_builder import BuildConfig, build_avocado, build_sizesearch, collect_candidates
from .vocab_model import (
    DomainVocabulary,
    ExtendedVocabulary,
    MergeRuleTable,
    Vocabulary,
    extend,
    load_extended,
    load_merges,
    load_vocabulary,
    save_extended,
)

__version__ = "0.1.0"
