from falpv_lft.realization.hankel import hankel_matrix as hankel_matrix
from falpv_lft.realization.hankel import hankel_realize as hankel_realize
from falpv_lft.realization.hankel import representation_series as representation_series
from falpv_lft.realization.hankel import representation_to_lft as representation_to_lft
from falpv_lft.realization.minimization import is_minimal as is_minimal
from falpv_lft.realization.minimization import minimize_lft as minimize_lft
from falpv_lft.realization.minimization import restrict as restrict
from falpv_lft.realization.stability import check_stability as check_stability
from falpv_lft.realization.stability import lift_certificate as lift_certificate
from falpv_lft.realization.stability import stabilize_scale as stabilize_scale
from falpv_lft.realization.stability import verify_certificate as verify_certificate
from falpv_lft.realization.subspaces import observable_bases as observable_bases
from falpv_lft.realization.subspaces import reachable_bases as reachable_bases
