from .atoms import (INF, Atom, SeparableDecomposition, Verification, atom_from_lorentz, atom_from_vector,
                    split_lorentz, verify_decomposition)
from .cases import (CoreFailure, InternalInconsistency, ProgressFailure, Undecided, decompose,
                    decompose_43, decompose_53, decompose_63, decompose_real_block_hankel, peel_63,
                    rank_one_in_subspace)
from .classify import TABLES, ClassificationEntry, classify, diff as table_diff, render as render_table
from .completion import CommutationFailure, completion_atoms, completion_decompose, simultaneous_diagonalize
from .hankel import (HankelElement, decompose_complex_hankel, decompose_hankel, decompose_s2qn,
                     pair_diagonalize)
from .spectrahedra import (DepthExceeded, LinearSpectrahedron, LineSearchFailure, extreme_ray_driver,
                           gamma_cone, symmetric_slice)
