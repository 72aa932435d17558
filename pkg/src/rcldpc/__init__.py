"""Root-Check LDPC codes for block-fading channels: construction, encoding, decoding and simulation."""

__version__ = "0.1.0"

from .analysis import FerPoint, OutagePoint, diversity_slope, fer_sweep, outage_probability, outage_single_block, snr_at_fer
from .channel import ChannelSpec
from .codec import LinearCode, encode, puncture, syndrome
from .codefile import load_code, save_code
from .construction import construct, girth, peg_place, verify_root_check
from .decoder import SpaDecoder, spa_decode
from .gf2 import BitMatrix, from_alist, invert, multiply, rank, to_alist
from .scaffold import CodeFamily, make_scaffold

__all__ = [
    "BitMatrix", "ChannelSpec", "CodeFamily", "FerPoint", "LinearCode", "OutagePoint", "SpaDecoder",
    "construct", "diversity_slope", "encode", "fer_sweep", "from_alist", "girth", "invert", "load_code",
    "make_scaffold", "multiply", "outage_probability", "outage_single_block", "peg_place", "puncture",
    "rank", "save_code", "snr_at_fer", "spa_decode", "syndrome", "to_alist", "verify_root_check",
]
