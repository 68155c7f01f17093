from falpv_lft.transform.pipeline import PreparedPsi as PreparedPsi
from falpv_lft.transform.pipeline import TransformResult as TransformResult
from falpv_lft.transform.pipeline import assemble as assemble
from falpv_lft.transform.pipeline import factor_coefficient_block as factor_coefficient_block
from falpv_lft.transform.pipeline import fast_path_factor as fast_path_factor
from falpv_lft.transform.pipeline import lift_kron as lift_kron
from falpv_lft.transform.pipeline import minimal_sigma_psi as minimal_sigma_psi
from falpv_lft.transform.pipeline import prepare_psi as prepare_psi
from falpv_lft.transform.pipeline import psi_series as psi_series
from falpv_lft.transform.pipeline import realize_psi as realize_psi
from falpv_lft.transform.pipeline import tilde_series as tilde_series
from falpv_lft.transform.pipeline import transform as transform
