import configparser
import logging
from pathlib import Path
from typing import Dict, Union

from pydantic import ValidationError

from ..errors import (
    ConfigSyntaxError,
    ConflictingSources,
    InvariantViolation,
    IOFailure,
    MissingSection,
)
from ..schemas.stream import (
    DualDeviceSource,
    FileSource,
    SingleDeviceSource,
    StreamConfig,
)

logger = logging.getLogger(__name__)

# Keys are matched case-insensitively (configparser lowercases them)
KNOWN_KEYS = {
    "camera": {"devnumber", "width", "height", "fps", "file"},
    "camera0": {"devnumber"},
    "camera1": {"devnumber"},
    "processing": {"width", "height"},
    "native": {"width", "height"},
}


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return value[1:-1]
    return value


class StreamConfigService:
    """
    Streaming configuration (.ini) handling.

    Layout of the file::

        [camera]        width, height, fps; devNumber and/or file
        [camera0]       devNumber     (two-device setups)
        [camera1]       devNumber
        [processing]    width, height
        [native]        width, height

    devNumber=-1 with a file key selects a pre-recorded source, devNumber>=0
    a single side-by-side device, [camera0]+[camera1] two devices.
    """

    @staticmethod
    def _read(ini_text: str) -> configparser.ConfigParser:
        parser = configparser.ConfigParser(
            comment_prefixes=("#", ";"),
            inline_comment_prefixes=None,
            interpolation=None,
            strict=True,
        )
        try:
            parser.read_string(ini_text)
        except configparser.MissingSectionHeaderError as e:
            raise ConfigSyntaxError(e.lineno, "key outside of any [section]") from e
        except configparser.ParsingError as e:
            lineno, line = e.errors[0]
            raise ConfigSyntaxError(lineno, f"cannot parse {line!r}") from e
        except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as e:
            raise ConfigSyntaxError(e.lineno or 0, e.message) from e
        return parser

    @staticmethod
    def _int(section: configparser.SectionProxy, key: str, name: str) -> int:
        if key not in section:
            raise InvariantViolation(name, f"missing key '{key}' in [{section.name}]")
        raw = _unquote(section[key])
        try:
            return int(raw)
        except ValueError as e:
            raise InvariantViolation(name, f"'{raw}' is not an integer") from e

    @staticmethod
    def _warn_unknown(parser: configparser.ConfigParser) -> None:
        for name in parser.sections():
            known = KNOWN_KEYS.get(name)
            if known is None:
                logger.warning("Ignoring unknown config section [%s]", name)
                continue
            for key in parser[name]:
                if key not in known:
                    logger.warning("Ignoring unknown config key '%s' in [%s]", key, name)

    @staticmethod
    def parse_stream_config(ini_text: str) -> StreamConfig:
        parser = StreamConfigService._read(ini_text)
        for required in ("camera", "processing", "native"):
            if not parser.has_section(required):
                raise MissingSection(required)
        StreamConfigService._warn_unknown(parser)

        camera = parser["camera"]
        has_pair = parser.has_section("camera0") or parser.has_section("camera1")
        has_file = "file" in camera

        if has_pair:
            for name in ("camera0", "camera1"):
                if not parser.has_section(name):
                    raise MissingSection(name)
            if has_file:
                raise ConflictingSources("Config names both a file source and [camera0]/[camera1] devices")
            source = DualDeviceSource(
                dev0=StreamConfigService._int(parser["camera0"], "devnumber", "camera0.devNumber"),
                dev1=StreamConfigService._int(parser["camera1"], "devnumber", "camera1.devNumber"),
            )
        else:
            dev = StreamConfigService._int(camera, "devnumber", "devNumber") if "devnumber" in camera else -1
            if dev >= 0:
                if has_file:
                    raise ConflictingSources(f"devNumber={dev} and file= are both set in [camera]")
                source = SingleDeviceSource(dev_number=dev)
            elif has_file:
                source = FileSource(path=_unquote(camera["file"]))
            else:
                raise InvariantViolation("devNumber", "devNumber=-1 requires a file key")

        values: Dict[str, object] = {
            "camera_width": StreamConfigService._int(camera, "width", "camera.width"),
            "camera_height": StreamConfigService._int(camera, "height", "camera.height"),
            "fps": StreamConfigService._int(camera, "fps", "camera.fps"),
            "source": source,
            "processing_width": StreamConfigService._int(parser["processing"], "width", "processing.width"),
            "processing_height": StreamConfigService._int(parser["processing"], "height", "processing.height"),
            "native_width": StreamConfigService._int(parser["native"], "width", "native.width"),
            "native_height": StreamConfigService._int(parser["native"], "height", "native.height"),
        }
        try:
            return StreamConfig(**values)
        except ValidationError as e:
            error = e.errors()[0]
            name = ".".join(str(part) for part in error["loc"]) or "config"
            raise InvariantViolation(name, error["msg"]) from e

    @staticmethod
    def load_stream_config(path: Union[str, Path]) -> StreamConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise IOFailure(f"Cannot read config {path}: {e}") from e
        return StreamConfigService.parse_stream_config(text)

    @staticmethod
    def write_stream_config(cfg: StreamConfig) -> str:
        """Canonical INI text; parse_stream_config reads it back to an equal config."""
        lines = ["[camera]"]
        source = cfg.source
        if isinstance(source, SingleDeviceSource):
            lines.append(f"devNumber={source.dev_number}")
        elif isinstance(source, FileSource):
            lines.append("devNumber=-1")
        lines += [f"width={cfg.camera_width}", f"height={cfg.camera_height}", f"fps={cfg.fps}"]
        if isinstance(source, FileSource):
            lines.append(f'file="{source.path}"')
        if isinstance(source, DualDeviceSource):
            lines += ["[camera0]", f"devNumber={source.dev0}", "[camera1]", f"devNumber={source.dev1}"]
        lines += [
            "[processing]", f"width={cfg.processing_width}", f"height={cfg.processing_height}",
            "[native]", f"width={cfg.native_width}", f"height={cfg.native_height}",
        ]
        return "\n".join(lines) + "\n"
