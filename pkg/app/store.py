from pathlib import Path
from typing import List, Optional

from .config import get_settings
from .models.lutmap import LutMap
from .schemas.maps import NAME_PATTERN
from .services.lenmap import LenmapService

settings = get_settings()


class MapStore:
    """Directory of named .map files backing the HTTP API."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def ensure(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, name: str) -> Path:
        if not NAME_PATTERN.match(name):
            raise ValueError(f"Invalid map name '{name}'")
        return self.root / f"{name}.map"

    def exists(self, name: str) -> bool:
        return self.path_for(name).is_file()

    def names(self) -> List[str]:
        if not self.root.is_dir():
            return []
        return sorted(path.stem for path in self.root.glob("*.map"))

    def get(self, name: str) -> Optional[LutMap]:
        path = self.path_for(name)
        if not path.is_file():
            return None
        return LenmapService.load_map(path)

    def save(self, name: str, lut: LutMap) -> None:
        self.ensure()
        LenmapService.save_map(lut, self.path_for(name))

    def delete(self, name: str) -> bool:
        path = self.path_for(name)
        if path.is_file():
            path.unlink()
            return True
        return False


def get_store() -> MapStore:
    return MapStore(settings.map_dir)


def create_store() -> None:
    MapStore(settings.map_dir).ensure()
