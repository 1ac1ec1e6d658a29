"""A small synthetic guideline corpus covering all 14 anatomy groups.

The texts are written to exercise the whole pipeline: view phrases drive
acquisition steps, segmentation and measurement phrasing drives tool
mapping, and the comparator sentences drive hypothesis rules. They are
fixtures, not clinical advice.
"""
from __future__ import annotations

from pathlib import Path

CORPUS_DOCS: dict[str, str] = {
    "lv-acquisition": (
        "Left ventricular assessment requires dedicated image acquisition.\n\n"
        "Acquire the apical-2-chamber view and the apical-4-chamber view of the "
        "left ventricle with the full endocardium visible throughout the cardiac cycle."
    ),
    "lv-segmentation": (
        "Segment the left ventricle endocardial border in the apical-2-chamber and "
        "apical-4-chamber views at end-diastole and end-systole. Papillary muscles "
        "are excluded from the left ventricular cavity contour."
    ),
    "lv-quantification": (
        "Measure the left ventricular end-diastolic volume and the end-systolic "
        "volume with the biplane method of disks. Calculate the left ventricular "
        "ejection fraction as the stroke volume divided by the end-diastolic "
        "volume, expressed in percent."
    ),
    "lv-grading": (
        "Ejection fraction of 50% or higher indicates normal left ventricular "
        "systolic function.\n\n"
        "Ejection fraction between 40% and 50% indicates mildly reduced left "
        "ventricular systolic function.\n\n"
        "EF below 40% indicates considerably reduced function."
    ),
    "rv-function": (
        "Assess the right ventricle in the apical-4-chamber view optimized for "
        "the right heart.\n\n"
        "Segment the right ventricular endocardial border at end-diastole and "
        "end-systole.\n\n"
        "Right ventricular fractional area change below 35% indicates reduced "
        "right ventricular systolic function."
    ),
    "la-size": (
        "Assess the left atrium in the apical-4-chamber view.\n\n"
        "Segment the left atrial endocardial border, excluding the pulmonary vein "
        "confluence and the left atrial appendage.\n\n"
        "Measure the left atrial cross-sectional area by planimetry.\n\n"
        "Left atrial area above 2400 mm2 indicates left atrial enlargement. "
        "Left atrial area of 2400 mm2 or lower indicates a normal left atrium."
    ),
    "ra-size": (
        "Assess the right atrium in the apical-4-chamber view.\n\n"
        "Segment the right atrial endocardial border at end-systole.\n\n"
        "Right atrial area above 1800 mm2 indicates right atrial enlargement."
    ),
    "mitral-valve": (
        "Inspect the mitral valve leaflets in the parasternal long-axis view.\n\n"
        "Segment the mitral annulus plane for orientation.\n\n"
        "Measure the mitral annular diameter at end-diastole.\n\n"
        "Mean transmitral gradient above 10 mmHg indicates significant mitral stenosis."
    ),
    "aortic-valve": (
        "Interrogate the aortic valve in the parasternal long-axis view.\n\n"
        "Segment the aortic valve leaflets during systole.\n\n"
        "Measure the aortic valve effective orifice area.\n\n"
        "Aortic valve area below 100 mm2 indicates severe aortic stenosis."
    ),
    "tricuspid-valve": (
        "Assess the tricuspid valve in the apical-4-chamber view with color "
        "Doppler.\n\n"
        "Segment the tricuspid annulus for diameter measurement.\n\n"
        "Measure the tricuspid annular diameter at end-diastole.\n\n"
        "Tricuspid annular diameter above 40 mm indicates significant annular dilation."
    ),
    "pulmonic-valve": (
        "Examine the pulmonic valve in the parasternal short-axis plane at the "
        "level of the great vessels.\n\n"
        "Peak pulmonary valve velocity above 3 m/s suggests pulmonic stenosis."
    ),
    "pericardium": (
        "Evaluate the pericardium in the parasternal long-axis view.\n\n"
        "Segment the pericardial layer adjacent to the ventricular walls.\n\n"
        "Measure the pericardial cross-sectional area on the acquired image.\n\n"
        "Pericardial area above 2000 mm2 indicates pericardial thickening. "
        "Pericardial area of 2000 mm2 or lower indicates a normal pericardium."
    ),
    "aorta": (
        "Survey the thoracic aorta including the aortic root and the ascending "
        "aorta from the parasternal long-axis view.\n\n"
        "Measure the aortic root diameter at the sinuses of Valsalva at "
        "end-diastole.\n\n"
        "Aortic root diameter above 40 mm indicates aortic dilation."
    ),
    "pulmonary-artery": (
        "Visualize the main pulmonary artery from the parasternal short-axis "
        "plane.\n\n"
        "Measure the main pulmonary artery diameter at end-diastole.\n\n"
        "Main pulmonary artery diameter above 29 mm indicates pulmonary arterial dilation."
    ),
    "interatrial-septum": (
        "Examine the interatrial septum from the subcostal window for defects.\n\n"
        "Segment the interatrial septum contour when a shunt study is performed.\n\n"
        "An atrial septal aneurysm shows excursion above 10 mm from the septal plane."
    ),
    "interventricular-septum": (
        "Evaluate the interventricular septum in the parasternal long-axis view.\n\n"
        "Measure the interventricular septal thickness at end-diastole.\n\n"
        "Interventricular septal thickness above 15 mm indicates significant hypertrophy."
    ),
    "inferior-vena-cava": (
        "Image the inferior vena cava from the subcostal window during quiet "
        "respiration.\n\n"
        "Measure the inferior vena cava diameter proximal to the hepatic vein "
        "confluence.\n\n"
        "Inferior vena cava diameter above 21 mm indicates elevated right atrial pressure."
    ),
}


def write_corpus(corpus_dir: str | Path) -> list[Path]:
    """Write the fixture corpus as .txt files; returns the paths written."""
    root = Path(corpus_dir)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(CORPUS_DOCS):
        path = root / f"{name}.txt"
        path.write_text(CORPUS_DOCS[name] + "\n", encoding="utf-8")
        written.append(path)
    return written
