"""Parse heterogeneous crime-record CSVs into one canonical schema.

Each supported source has a registered adapter: its column set, a
signature (the columns that identify it), an explicit date format, and
a mapping from source columns onto the 26 canonical attributes. Rows
the adapter cannot parse are quarantined with a reason code; rows the
source filter rejects (non-U.S. terrorism events) are counted as
dropped. Everything else lands in one merged dataset with per-source
provenance.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field, fields as dc_fields
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping

from .errors import AmbiguousSchema, EmptyDataset, MalformedValue, UnrecognizedSchema


class SourceKind(str, Enum):
    BOSTON_CRIME = "BostonCrime"
    CHICAGO_CRIME = "ChicagoCrime"
    DENVER_CRIME = "DenverCrime"
    PHILLY_CRIME = "PhillyCrime"
    SAN_FRANCISCO_CRIME = "SanFranciscoCrime"
    FATAL_POLICE_SHOOTINGS = "FatalPoliceShootings"
    HOMICIDE_REPORTS = "HomicideReports"
    GLOBAL_TERRORISM = "GlobalTerrorism"
    MASS_SHOOTINGS = "MassShootings"
    CANONICAL = "Canonical"


# Canonical CSV column order is fixed (column-major reading order of the
# unified schema) so output files are byte-stable.
CANONICAL_COLUMNS = (
    "Date", "CrimeType", "CrimeDetail", "Lat", "Long", "LocDescription",
    "City", "Street", "State", "VictimAge", "VictimRace", "VictimGender",
    "VictimDescription", "TotalVictims", "PerpeMental", "PerpeFlee",
    "PerpeRace", "PerpeGender", "PerpeAge", "PerpeNationality",
    "PerpeVicRelation", "Weapon", "Motivation", "NewsCoverage",
    "PropertyDamage", "DataBase",
)


@dataclass
class CrimeRecord:
    """One canonical crime event. Every attribute but ``database`` is nullable."""

    date: dt.date | None = None
    crime_type: str | None = None
    crime_detail: str | None = None
    lat: float | None = None
    long: float | None = None
    loc_description: str | None = None
    city: str | None = None
    street: str | None = None
    state: str | None = None
    victim_age: int | None = None
    victim_race: str | None = None
    victim_gender: str | None = None
    victim_description: str | None = None
    total_victims: int | None = None
    perpe_mental: str | None = None
    perpe_flee: str | None = None
    perpe_race: str | None = None
    perpe_gender: str | None = None
    perpe_age: int | None = None
    perpe_nationality: str | None = None
    perpe_vic_relation: str | None = None
    weapon: str | None = None
    motivation: str | None = None
    news_coverage: str | None = None
    property_damage: str | None = None
    database: SourceKind = SourceKind.CANONICAL


CANONICAL_FIELDS = tuple(f.name for f in dc_fields(CrimeRecord))
assert len(CANONICAL_FIELDS) == len(CANONICAL_COLUMNS)

_DATE_FIELDS = {"date"}
_FLOAT_BOUNDS = {"lat": (-90.0, 90.0), "long": (-180.0, 180.0)}
_INT_BOUNDS = {"victim_age": (0, 130), "perpe_age": (0, 130), "total_victims": (0, None)}


class _Dropped:
    """Sentinel for rows rejected by a source filter (not an error)."""

    def __repr__(self) -> str:  # pragma: no cover
        return "DROPPED"


DROPPED = _Dropped()

# Reserved key a CSV reader sets when a data row is wider than the header.
ROW_WIDTH_KEY = "__row_width__"


@dataclass(frozen=True)
class SourceAdapter:
    kind: SourceKind
    columns: tuple[str, ...]
    signature: frozenset[str]
    date_format: str
    field_map: Mapping[str, str] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    derive: Mapping[str, Callable[[Mapping[str, str]], str | None]] = field(default_factory=dict)
    drop: Callable[[Mapping[str, str]], bool] | None = None


def _gtd_date(raw: Mapping[str, str]) -> str | None:
    """Compose YYYY-MM-DD from the terrorism source's numeric parts.

    Unknown month/day are recorded as 0 in that source; they clamp to 1.
    """
    year = (raw.get("iyear") or "").strip()
    if not year:
        return None
    month = max(int(raw.get("imonth") or 0) or 1, 1) if (raw.get("imonth") or "").strip().isdigit() else 1
    day = max(int(raw.get("iday") or 0) or 1, 1) if (raw.get("iday") or "").strip().isdigit() else 1
    return f"{year}-{month:02d}-{day:02d}"


def _homicide_date(raw: Mapping[str, str]) -> str | None:
    """Year + month-name columns become the first of that month."""
    year = (raw.get("Year") or "").strip()
    month = (raw.get("Month") or "").strip()
    if not year or not month:
        return None
    try:
        month_num = dt.datetime.strptime(month, "%B").month
    except ValueError:
        return f"{year}-??"  # surfaces as bad_date in the parser
    return f"{year}-{month_num:02d}-01"


def _location_part(index: int) -> Callable[[Mapping[str, str]], str | None]:
    def _part(raw: Mapping[str, str]) -> str | None:
        loc = (raw.get("Location") or "").strip()
        if not loc:
            return None
        parts = [p.strip() for p in loc.split(",")]
        return parts[index] if index < len(parts) else None

    return _part


def _not_us(raw: Mapping[str, str]) -> bool:
    return (raw.get("country_txt") or "").strip() != "United States"


ADAPTERS: dict[SourceKind, SourceAdapter] = {}


def _register(adapter: SourceAdapter) -> None:
    ADAPTERS[adapter.kind] = adapter


_register(SourceAdapter(
    kind=SourceKind.BOSTON_CRIME,
    columns=("OFFENSE_CODE_GROUP", "OFFENSE_DESCRIPTION", "OCCURRED_ON_DATE",
             "STREET", "Lat", "Long"),
    signature=frozenset({"OFFENSE_CODE_GROUP", "OCCURRED_ON_DATE"}),
    date_format="%Y-%m-%d %H:%M:%S",
    field_map={"date": "OCCURRED_ON_DATE", "crime_type": "OFFENSE_CODE_GROUP",
               "crime_detail": "OFFENSE_DESCRIPTION", "street": "STREET",
               "lat": "Lat", "long": "Long"},
    constants={"city": "Boston", "state": "MA"},
))

_register(SourceAdapter(
    kind=SourceKind.CHICAGO_CRIME,
    columns=("Date", "Block", "Primary Type", "Description",
             "Location Description", "Latitude", "Longitude"),
    signature=frozenset({"Primary Type", "Location Description"}),
    date_format="%m/%d/%Y %I:%M:%S %p",
    field_map={"date": "Date", "crime_type": "Primary Type",
               "crime_detail": "Description", "loc_description": "Location Description",
               "street": "Block", "lat": "Latitude", "long": "Longitude"},
    constants={"city": "Chicago", "state": "IL"},
))

_register(SourceAdapter(
    kind=SourceKind.DENVER_CRIME,
    columns=("OFFENSE_TYPE_ID", "OFFENSE_CATEGORY_ID", "FIRST_OCCURRENCE_DATE",
             "INCIDENT_ADDRESS", "GEO_LON", "GEO_LAT"),
    signature=frozenset({"OFFENSE_CATEGORY_ID", "GEO_LON"}),
    date_format="%Y-%m-%d %H:%M:%S",
    field_map={"date": "FIRST_OCCURRENCE_DATE", "crime_type": "OFFENSE_CATEGORY_ID",
               "crime_detail": "OFFENSE_TYPE_ID", "street": "INCIDENT_ADDRESS",
               "lat": "GEO_LAT", "long": "GEO_LON"},
    constants={"city": "Denver", "state": "CO"},
))

_register(SourceAdapter(
    kind=SourceKind.PHILLY_CRIME,
    columns=("Dispatch_Date", "Text_General_Code", "Location_Block", "Lat", "Lon"),
    signature=frozenset({"Text_General_Code", "Dispatch_Date"}),
    date_format="%Y-%m-%d",
    field_map={"date": "Dispatch_Date", "crime_type": "Text_General_Code",
               "street": "Location_Block", "lat": "Lat", "long": "Lon"},
    constants={"city": "Philadelphia", "state": "PA"},
))

_register(SourceAdapter(
    kind=SourceKind.SAN_FRANCISCO_CRIME,
    columns=("Category", "Descript", "Date", "PdDistrict", "X", "Y"),
    signature=frozenset({"Descript", "PdDistrict"}),
    date_format="%m/%d/%Y",
    field_map={"date": "Date", "crime_type": "Category", "crime_detail": "Descript",
               "loc_description": "PdDistrict", "lat": "Y", "long": "X"},
    constants={"city": "San Francisco", "state": "CA"},
))

_register(SourceAdapter(
    kind=SourceKind.FATAL_POLICE_SHOOTINGS,
    columns=("id", "name", "date", "manner_of_death", "armed", "age", "gender",
             "race", "city", "state", "signs_of_mental_illness", "threat_level",
             "flee", "body_camera"),
    signature=frozenset({"manner_of_death", "signs_of_mental_illness"}),
    date_format="%Y-%m-%d",
    field_map={"date": "date", "crime_type": "manner_of_death",
               "crime_detail": "threat_level", "victim_age": "age",
               "victim_gender": "gender", "victim_race": "race",
               "victim_description": "name", "city": "city", "state": "state",
               "perpe_mental": "signs_of_mental_illness", "perpe_flee": "flee",
               "weapon": "armed"},
    constants={"total_victims": "1"},
))

_register(SourceAdapter(
    kind=SourceKind.HOMICIDE_REPORTS,
    columns=("Record ID", "Agency Name", "City", "State", "Year", "Month",
             "Crime Type", "Crime Solved", "Victim Sex", "Victim Age",
             "Victim Race", "Perpetrator Sex", "Perpetrator Age",
             "Perpetrator Race", "Relationship", "Weapon", "Victim Count",
             "Record Source"),
    signature=frozenset({"Victim Age", "Perpetrator Race"}),
    date_format="%Y-%m-%d",
    field_map={"crime_type": "Crime Type", "city": "City", "state": "State",
               "victim_age": "Victim Age", "victim_gender": "Victim Sex",
               "victim_race": "Victim Race", "perpe_age": "Perpetrator Age",
               "perpe_gender": "Perpetrator Sex", "perpe_race": "Perpetrator Race",
               "perpe_vic_relation": "Relationship", "weapon": "Weapon",
               "total_victims": "Victim Count"},
    derive={"date": _homicide_date},
))

_register(SourceAdapter(
    kind=SourceKind.GLOBAL_TERRORISM,
    columns=("eventid", "iyear", "imonth", "iday", "country_txt", "region_txt",
             "provstate", "city", "latitude", "longitude", "attacktype1_txt",
             "targtype1_txt", "gname", "natlty1_txt", "weaptype1_txt", "nkill",
             "motive"),
    signature=frozenset({"country_txt", "attacktype1_txt"}),
    date_format="%Y-%m-%d",
    field_map={"crime_type": "attacktype1_txt", "crime_detail": "targtype1_txt",
               "city": "city", "state": "provstate", "lat": "latitude",
               "long": "longitude", "weapon": "weaptype1_txt",
               "motivation": "motive", "total_victims": "nkill",
               "perpe_nationality": "natlty1_txt"},
    derive={"date": _gtd_date},
    drop=_not_us,
))

_register(SourceAdapter(
    kind=SourceKind.MASS_SHOOTINGS,
    columns=("S#", "Title", "Location", "Date", "Incident Area", "Cause",
             "Summary", "Total victims", "Mental Health Issues", "Race",
             "Gender", "Latitude", "Longitude"),
    signature=frozenset({"Total victims", "Mental Health Issues"}),
    date_format="%m/%d/%Y",
    field_map={"date": "Date", "crime_detail": "Summary",
               "loc_description": "Incident Area", "motivation": "Cause",
               "news_coverage": "Title", "total_victims": "Total victims",
               "perpe_mental": "Mental Health Issues", "perpe_race": "Race",
               "perpe_gender": "Gender", "lat": "Latitude", "long": "Longitude"},
    constants={"crime_type": "Mass Shooting"},
    derive={"city": _location_part(0), "state": _location_part(1)},
))

_register(SourceAdapter(
    kind=SourceKind.CANONICAL,
    columns=CANONICAL_COLUMNS,
    signature=frozenset(CANONICAL_COLUMNS),
    date_format="%Y-%m-%d",
    field_map=dict(zip(CANONICAL_FIELDS[:-1], CANONICAL_COLUMNS[:-1])),
))


def detect_schema(header: Iterable[str]) -> SourceKind:
    """Identify the source whose signature columns are all present.

    Detection is by column signature, not filename: files get renamed,
    headers don't.
    """
    columns = set(header)
    if not columns:
        raise UnrecognizedSchema("empty header")
    matches = [a.kind for a in ADAPTERS.values() if a.signature <= columns]
    if not matches:
        raise UnrecognizedSchema(f"no registered signature matches {sorted(columns)[:8]}")
    if len(matches) > 1:
        raise AmbiguousSchema(f"header matches {[m.value for m in sorted(matches)]}")
    return matches[0]


def _parse_value(field_name: str, text: str, date_format: str):
    if field_name in _DATE_FIELDS:
        try:
            return dt.datetime.strptime(text, date_format).date()
        except ValueError:
            raise MalformedValue(field_name, f"bad_date:{text!r}")
    if field_name in _FLOAT_BOUNDS:
        try:
            value = float(text)
        except ValueError:
            raise MalformedValue(field_name, f"bad_number:{text!r}")
        lo, hi = _FLOAT_BOUNDS[field_name]
        if not (lo <= value <= hi):
            raise MalformedValue(field_name, f"out_of_range:{text!r}")
        return value
    if field_name in _INT_BOUNDS:
        try:
            value = int(float(text)) if "." in text else int(text)
        except ValueError:
            raise MalformedValue(field_name, f"bad_number:{text!r}")
        lo, hi = _INT_BOUNDS[field_name]
        if value < lo or (hi is not None and value > hi):
            raise MalformedValue(field_name, f"out_of_range:{text!r}")
        return value
    return text


def adapt_record(raw: Mapping[str, str], source: SourceKind) -> CrimeRecord | _Dropped:
    """Adapt one raw row into the canonical schema.

    Every canonical attribute the source lacks is null. Returns
    ``DROPPED`` for rows the source filter rejects; raises
    :class:`MalformedValue` for rows whose fields fail to parse.
    """
    adapter = ADAPTERS[source]
    if ROW_WIDTH_KEY in raw:
        raise MalformedValue("row", "extra_cells")
    if adapter.drop is not None and adapter.drop(raw):
        return DROPPED

    values: dict[str, object] = {}
    for field_name in CANONICAL_FIELDS[:-1]:
        if field_name in adapter.derive:
            text = adapter.derive[field_name](raw)
        elif field_name in adapter.field_map:
            text = raw.get(adapter.field_map[field_name])
        elif field_name in adapter.constants:
            text = adapter.constants[field_name]
        else:
            text = None
        text = text.strip() if isinstance(text, str) else text
        values[field_name] = _parse_value(field_name, text, adapter.date_format) if text else None

    if source is SourceKind.CANONICAL:
        # Re-ingesting our own output keeps the original source tag so the
        # round trip is field-for-field idempotent.
        tag = (raw.get("DataBase") or "").strip()
        try:
            values["database"] = SourceKind(tag)
        except ValueError:
            raise MalformedValue("database", f"unknown_source:{tag!r}")
    else:
        values["database"] = source
    return CrimeRecord(**values)


@dataclass
class MergedCrimeDataset:
    """Ordered canonical records plus per-source retained-row counts."""

    records: list[CrimeRecord]
    provenance: dict[SourceKind, int]


@dataclass
class QuarantinedRow:
    source: SourceKind
    row_index: int
    row: dict[str, str]
    reason: str


@dataclass
class MergeReport:
    dataset: MergedCrimeDataset
    quarantined: list[QuarantinedRow]
    dropped: dict[SourceKind, int]

    def counts(self) -> dict[str, dict[str, int]]:
        """Per-source retained/dropped/quarantined counts (JSON-friendly)."""
        out: dict[str, dict[str, int]] = {}
        sources = set(self.dataset.provenance) | set(self.dropped)
        sources |= {q.source for q in self.quarantined}
        for kind in sorted(sources, key=lambda k: k.value):
            out[kind.value] = {
                "retained": self.dataset.provenance.get(kind, 0),
                "dropped": self.dropped.get(kind, 0),
                "quarantined": sum(1 for q in self.quarantined if q.source is kind),
            }
        return out


def merge_sources(
    inputs: Iterable[tuple[SourceKind, Iterable[Mapping[str, str]]]],
) -> MergeReport:
    """Adapt and concatenate all sources, in input order, row order preserved.

    A bad row never aborts the merge; it is quarantined with its reason.
    """
    records: list[CrimeRecord] = []
    provenance: dict[SourceKind, int] = {}
    dropped: dict[SourceKind, int] = {}
    quarantined: list[QuarantinedRow] = []

    for kind, rows in inputs:
        if kind not in ADAPTERS:
            raise UnrecognizedSchema(f"unknown source kind {kind!r}")
        retained = 0
        n_dropped = 0
        for row_index, raw in enumerate(rows):
            try:
                adapted = adapt_record(raw, kind)
            except MalformedValue as exc:
                clean = {k: v for k, v in raw.items() if k != ROW_WIDTH_KEY}
                quarantined.append(QuarantinedRow(kind, row_index, dict(clean), str(exc)))
                continue
            if adapted is DROPPED:
                n_dropped += 1
                continue
            records.append(adapted)
            retained += 1
        provenance[kind] = provenance.get(kind, 0) + retained
        dropped[kind] = dropped.get(kind, 0) + n_dropped

    return MergeReport(MergedCrimeDataset(records, provenance), quarantined, dropped)


def source_distribution(dataset: MergedCrimeDataset) -> dict[SourceKind, float]:
    """Retained-row fraction per source; fractions sum to 1."""
    total = len(dataset.records)
    if total == 0:
        raise EmptyDataset("cannot compute a distribution over zero records")
    return {kind: count / total for kind, count in dataset.provenance.items()}


# ---------------------------------------------------------------------------
# CSV I/O


def read_csv_rows(path: str | Path) -> tuple[list[str], Iterator[dict[str, str]]]:
    """Read an RFC-4180 CSV; returns the header plus a row-dict iterator.

    Rows shorter than the header are padded with empty cells (missing is
    null); rows wider than the header carry ``ROW_WIDTH_KEY`` so the
    adapter can quarantine them instead of silently truncating.
    """
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        handle.close()
        raise UnrecognizedSchema(f"{path}: file has no header row")

    def rows() -> Iterator[dict[str, str]]:
        with handle:
            for cells in reader:
                if not cells:
                    continue
                row = dict(zip(header, cells + [""] * (len(header) - len(cells))))
                if len(cells) > len(header):
                    row[ROW_WIDTH_KEY] = "1"
                yield row

    return header, rows()


def load_source(path: str | Path) -> tuple[SourceKind, Iterator[dict[str, str]]]:
    """Open a source CSV and detect which adapter owns it."""
    header, rows = read_csv_rows(path)
    return detect_schema(header), rows


def _format_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, dt.date):
        return value.isoformat()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, SourceKind):
        return value.value
    return str(value)


def write_canonical_csv(dataset: MergedCrimeDataset, path: str | Path) -> None:
    """Write the merged dataset; the empty string encodes null."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CANONICAL_COLUMNS)
        for record in dataset.records:
            writer.writerow(
                _format_value(getattr(record, name)) for name in CANONICAL_FIELDS
            )


def read_canonical_csv(path: str | Path) -> MergedCrimeDataset:
    """Load a canonical CSV back into a dataset (provenance recomputed)."""
    kind, rows = load_source(path)
    if kind is not SourceKind.CANONICAL:
        raise UnrecognizedSchema(f"{path}: not a canonical crime CSV")
    report = merge_sources([(SourceKind.CANONICAL, rows)])
    dataset = report.dataset
    provenance: dict[SourceKind, int] = {}
    for record in dataset.records:
        provenance[record.database] = provenance.get(record.database, 0) + 1
    dataset.provenance = provenance
    return dataset


def write_quarantine_csv(quarantined: list[QuarantinedRow], path: str | Path) -> None:
    """Quarantine side file: source, row index, reason, original row as JSON."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Source", "RowIndex", "Reason", "Row"])
        for q in quarantined:
            writer.writerow([
                q.source.value, q.row_index, q.reason,
                json.dumps(q.row, sort_keys=True),
            ])


def write_provenance_json(report: MergeReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.counts(), indent=2) + "\n", encoding="utf-8")
