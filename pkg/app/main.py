from fastapi import FastAPI
from contextlib import asynccontextmanager

from .config import get_settings
from .log import configure_logging
from .routers import calibration_router, maps_router
from .store import create_store

settings = get_settings()
configure_logging(settings.log_level)


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup: create the map directory
    create_store()
    yield


app = FastAPI(
    title="Holoquilt",
    description="""
## Holoquilt API

Builds and applies subpixel lookup tables for slanted-lenticular light field displays.

---

### Quilts

A quilt is a grid of views stored in one image. View 0 (leftmost camera) is
the bottom-left tile; views fill left to right, then upwards.

| Mask | Views | Typical view size (ROWSxCOLS) |
|------|-------|-------------------------------|
| 8x4 | 32 | 256x512 |
| 9x5 | 45 | 240x320 |
| 5x9 | 45 | 320x240 |

---

### Maps

A map stores, for every native subpixel, the quilt sample it shows. Build a
map once per device and quilt layout, then POST quilts as PNG to
`/maps/{name}/apply` to receive the native panel image.

### Calibration

`/calibration/mapping-params` returns the lens density, slant and phase
derived from a device calibration file.
    """,
    version="1.0.0",
    lifespan=lifespan,
)

# Include routers
app.include_router(maps_router, prefix=settings.api_v1_prefix)
app.include_router(calibration_router, prefix=settings.api_v1_prefix)


@app.get("/", tags=["Health"])
def root():
    """Health check endpoint."""
    return {
        "service": "Holoquilt",
        "status": "healthy",
        "version": "1.0.0",
    }


@app.get("/health", tags=["Health"])
def health_check():
    """Detailed health check."""
    return {
        "status": "healthy",
        "map_dir": settings.map_dir,
    }
