"""Key recovery against the SHMWW code-based signature scheme.

Modules: :mod:`~shmww.gf2` (packed binary linear algebra), :mod:`~shmww.scheme`
(keygen, sign, verify), :mod:`~shmww.distinguisher` (column statistics and
confidence analysis), :mod:`~shmww.isd` (row recovery and cost estimates),
:mod:`~shmww.serialize`, :mod:`~shmww.experiments` and :mod:`~shmww.cli`.
"""

from .distinguisher import (
    BitTally,
    DistinguisherConfig,
    column_probabilities,
    confidence_level,
    experimental_threshold,
    guess_random_columns,
    min_signatures,
    optimal_delta,
    tally,
)
from .gf2 import BitMatrix, BitVector, SingularMatrixError
from .isd import (
    AttackReport,
    attack_cost_estimate,
    full_attack,
    isd_success_probability,
    recover_private_key,
    recover_row,
)
from .params import PARA1, PARA2, SMALL, TOY, ParameterError, ParameterSet, get_params
from .scheme import PrivateKey, PublicKey, Signature, keygen, make_rng, sign, verify

__version__ = "0.1.0"
