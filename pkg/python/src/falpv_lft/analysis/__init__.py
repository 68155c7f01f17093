from falpv_lft.analysis.affine import affine_basis_coefficients as affine_basis_coefficients
from falpv_lft.analysis.equivalence import Equivalence as Equivalence
from falpv_lft.analysis.equivalence import falpv_equivalence as falpv_equivalence
from falpv_lft.analysis.equivalence import falpv_is_minimal as falpv_is_minimal
from falpv_lft.analysis.equivalence import falpv_minimize as falpv_minimize
from falpv_lft.analysis.equivalence import formal_equivalence as formal_equivalence
from falpv_lft.analysis.equivalence import structured_markov_check as structured_markov_check
from falpv_lft.analysis.equivalence import transform_falpv as transform_falpv
from falpv_lft.analysis.expression import PsiEvaluator as PsiEvaluator
from falpv_lft.analysis.expression import expression_evaluator as expression_evaluator
from falpv_lft.analysis.isomorphism import find_structured_isomorphism as find_structured_isomorphism
from falpv_lft.analysis.simulation import realization_evaluator as realization_evaluator
from falpv_lft.analysis.simulation import simulate_falpv as simulate_falpv
from falpv_lft.analysis.simulation import simulate_lft_loop as simulate_lft_loop
from falpv_lft.analysis.simulation import taylor_evaluator as taylor_evaluator
