"""Synthetic raw-input generator.

Writes the file formats the builders consume (notes, trials, qrels,
study/report tables with PPM images, unified multiple-choice records) so
the whole pipeline can run end to end without any licensed dataset.
Content is keyed by seed and deterministic.
"""

from __future__ import annotations

from pathlib import Path

from ..curriculum.data import COLORS, SHAPES, draw_shape
from ..model.ppm import write_ppm
from ..rng import KeyedRng
from ..util import write_jsonl
from .subjects import MMLU_MED_SUBJECTS

_CONDITIONS = ("type 2 diabetes", "hypertension", "asthma", "chronic kidney disease")
_AGES = (34, 45, 58, 62, 71)
_SEXES = ("Male", "Female")

_IMPRESSIONS = (
    "No acute cardiopulmonary abnormality.",
    "Mild cardiomegaly without pulmonary edema.",
    "Right lower lobe opacity concerning for pneumonia.",
    "Clear lungs. No pleural effusion or pneumothorax.",
    "Stable small left pleural effusion.",
)

_OTHER_SUBJECTS = ("philosophy", "world history", "high school physics")


def _make_note(rng: KeyedRng) -> str:
    sex = rng.choice(_SEXES)
    age = rng.choice(_AGES)
    cond = rng.choice(_CONDITIONS)
    extra = rng.choice((
        "Smoker for 20 years.",
        "No known drug allergies.",
        "Seen by Dr. Lee last month.",
        "Denies chest pain.",
    ))
    return f"{sex}, {age}. History of {cond}. {extra}"


def _make_trial(rng: KeyedRng, trial_id: str) -> dict:
    cond = rng.choice(_CONDITIONS)
    drug = rng.choice(("metformin", "lisinopril", "albuterol", "placebo"))
    return {
        "trial_id": trial_id,
        "title": f"Study of {drug} in {cond}",
        "diseases": [cond],
        "interventions": [drug],
        "summary": f"A randomized trial evaluating {drug} for {cond}.",
        "inclusion": ("Inclusion Criteria:\n"
                      f"- Adults aged 18 to 75 years\n"
                      f"2. Confirmed diagnosis of {cond}\n"
                      "N/A"),
        "exclusion": ("Exclusion Criteria:\n"
                      "- Pregnant or nursing women\n"
                      "(1) Severe hepatic impairment"),
    }


def write_patient_trial_inputs(out: Path, seed: int, n_patients: int = 6,
                               n_trials: int = 4, n_qrels: int = 12,
                               n_invalid_grades: int = 0,
                               n_dangling: int = 0) -> dict[str, Path]:
    out.mkdir(parents=True, exist_ok=True)
    patients = [f"p{i:03d}" for i in range(n_patients)]
    trials = [f"NCT{i:07d}" for i in range(n_trials)]
    notes = [{"patient_id": pid, "note": _make_note(KeyedRng(seed, "note", pid))}
             for pid in patients]
    trial_rows = [_make_trial(KeyedRng(seed, "trial", tid), tid) for tid in trials]
    lines = []
    for i in range(n_qrels):
        rng = KeyedRng(seed, "qrel", str(i))
        pid = patients[rng.randbelow(n_patients)]
        tid = trials[rng.randbelow(n_trials)]
        if i < n_invalid_grades:
            grade = 3 + rng.randbelow(3)
        elif i < n_invalid_grades + n_dangling:
            tid = "NCT9999999"
            grade = rng.randbelow(3)
        else:
            grade = rng.randbelow(3)
        lines.append(f"{pid} 0 {tid} {grade}")
    notes_path = out / "notes.jsonl"
    trials_path = out / "trials.jsonl"
    qrels_path = out / "qrels.txt"
    write_jsonl(notes_path, notes)
    write_jsonl(trials_path, trial_rows)
    qrels_path.write_text("\n".join(lines) + "\n")
    return {"notes": notes_path, "trials": trials_path, "qrels": qrels_path}


def write_impression_inputs(out: Path, seed: int, n_studies: int = 8,
                            n_missing_impression: int = 1,
                            n_missing_image: int = 1) -> dict[str, Path]:
    out.mkdir(parents=True, exist_ok=True)
    img_dir = out / "images"
    img_dir.mkdir(exist_ok=True)
    studies, reports = [], []
    for i in range(n_studies):
        sid = f"s{i:04d}"
        rng = KeyedRng(seed, "study", sid)
        color = rng.choice(sorted(COLORS))
        shape = rng.choice(SHAPES)
        image_path = img_dir / f"{sid}.ppm"
        missing_image = i < n_missing_image
        missing_impression = n_missing_image <= i < n_missing_image + n_missing_impression
        if not missing_image:
            write_ppm(image_path, draw_shape(color, shape, rng.child("img")))
        studies.append({"study_id": sid, "image_path": str(image_path)})
        reports.append({"study_id": sid,
                        "impression": "" if missing_impression
                        else rng.choice(_IMPRESSIONS)})
    studies_path = out / "studies.jsonl"
    reports_path = out / "reports.jsonl"
    write_jsonl(studies_path, studies)
    write_jsonl(reports_path, reports)
    return {"studies": studies_path, "reports": reports_path}


def write_mc_records(out: Path, seed: int, n_per_subject: int = 3,
                     with_images: bool = True) -> Path:
    """Unified-schema records across medical and non-medical subjects."""
    out.mkdir(parents=True, exist_ok=True)
    img_dir = out / "images"
    img_dir.mkdir(exist_ok=True)
    rows = []
    subjects = list(MMLU_MED_SUBJECTS) + list(_OTHER_SUBJECTS)
    shapes = list(SHAPES)
    for subj in subjects:
        for i in range(n_per_subject):
            iid = f"mc-{subj.replace(' ', '_')}-{i}"
            rng = KeyedRng(seed, "mc", iid)
            if with_images:
                color = rng.choice(sorted(COLORS))
                shape = rng.choice(shapes)
                image_path = img_dir / f"{iid}.ppm"
                write_ppm(image_path, draw_shape(color, shape, rng.child("img")))
                opts = [(chr(ord("A") + j), s) for j, s in enumerate(shapes)]
                gold = chr(ord("A") + shapes.index(shape))
                rows.append({
                    "id": iid, "dataset": "subjects", "subject": subj,
                    "question": "<image>\nwhat shape?",
                    "options": [[k, t] for k, t in opts],
                    "answer_key": gold,
                    "images": [str(image_path)],
                    "meta": {"color": color, "shape": shape},
                })
            else:
                opts = [["A", "alpha"], ["B", "beta"], ["C", "gamma"], ["D", "delta"]]
                rows.append({
                    "id": iid, "dataset": "subjects", "subject": subj,
                    "question": f"Pick option {i % 4 + 1} for {subj}.",
                    "options": opts,
                    "answer_key": "ABCD"[i % 4],
                    "meta": {},
                })
    path = out / "mc_records.jsonl"
    write_jsonl(path, rows)
    return path
