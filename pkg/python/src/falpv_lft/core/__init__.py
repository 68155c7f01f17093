from falpv_lft.core.lft import FalpvMatrices as FalpvMatrices
from falpv_lft.core.lft import WordProducts as WordProducts
from falpv_lft.core.lft import canonical_partition as canonical_partition
from falpv_lft.core.lft import delta_of_point as delta_of_point
from falpv_lft.core.lft import eval_falpv_matrices as eval_falpv_matrices
from falpv_lft.core.lft import formal_io_map as formal_io_map
from falpv_lft.core.lft import io_series as io_series
from falpv_lft.core.lft import lft_from_cells as lft_from_cells
from falpv_lft.core.lft import similarity_transform as similarity_transform
from falpv_lft.core.lft import star_product as star_product
from falpv_lft.core.lft import word_products as word_products
from falpv_lft.core.words import iter_words as iter_words
from falpv_lft.core.words import shift_word as shift_word
from falpv_lft.core.words import validate_word as validate_word
