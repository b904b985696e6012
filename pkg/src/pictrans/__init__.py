"""pictrans: style-consistent in-image translation at desk scale.

Pipeline: synthesize parallel text-image corpora, translate detected
text regions through a multimodal backend with chain-of-thought
prompting, backfill the translated text with a conditioned latent
diffusion model, and score results with image/text metrics.
"""

__version__ = "0.1.0"

from .corpus.geometry import TextBox
from .corpus.style import StyleSpec
from .fonts import FontRegistry

__all__ = ["FontRegistry", "StyleSpec", "TextBox", "__version__"]
