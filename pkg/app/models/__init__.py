from .correspondence import CorrespondenceField, FieldMode
from .image import Image, PixelCoord
from .lutmap import LutMap, SubpixelCoord

__all__ = ["CorrespondenceField", "FieldMode", "Image", "PixelCoord", "LutMap", "SubpixelCoord"]
