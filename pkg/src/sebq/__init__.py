"""Quasigroup block cipher toolkit.

Latin-square key material, the chained-mode SEBQ cipher, an
expander-hardened variant for chosen-ciphertext resistance, executable
indistinguishability games with the concrete attacks, and a statistical
analysis bench (randomness battery, avalanche, operation counts,
secure-order computation).
"""

from sebq.latin import (
    LatinSquare,
    LatinViolation,
    Quasigroup,
    StructureError,
    count_latin_squares_backtrack,
    count_latin_squares_formula,
    cyclic_latin_square,
    enumerate_latin_squares,
    intercalate_swap,
    is_latin_square,
    latin_square_log2_bounds,
    parastrophe,
    permanent,
    random_latin_square,
    validate_latin_square,
    xor_latin_square,
)
from sebq.transforms import (
    d_transform,
    e_transform,
    fold_apply,
    fold_reverse,
    leader_update_dec,
    leader_update_enc,
    xor_checksum,
)
from sebq.cipher import (
    CipherState,
    PaddingError,
    SebqKey,
    decrypt,
    decrypt_block,
    encrypt,
    encrypt_block,
    keygen,
    pack_bits,
    pad,
    unpack_bits,
    unpad,
)
from sebq.feistel import (
    Cca2Key,
    ConstantExpander,
    Expander,
    QuasigroupSponge,
    cca2_keygen,
    compress_fold,
    decrypt_cca2,
    encrypt_cca2,
)
from sebq.formats import (
    BadMagic,
    CipherFrame,
    FrameError,
    KeyFileError,
    KeyMismatch,
    decode_frame,
    encode_frame,
    key_fingerprint,
    load_key,
    open_bytes,
    save_key,
    seal_bytes,
)

__version__ = "0.1.0"
