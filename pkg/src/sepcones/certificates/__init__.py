from .claims import (CERTIFICATES, Certificate, Failed, certify, certify_44_counterexample,
                     certify_q2s3_psd_not_ppt, certify_q3_transpose, replay)
from .exact import IntPoly, MPoly, count_real_roots, det, exact_psd, poly_gcd, sturm_sequence
