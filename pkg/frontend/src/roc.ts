/** Hand-rolled SVG ROC chart: one polyline per arm, the random-model
 * diagonal, and an AUC label per arm. */

const SVG_NS = 'http://www.w3.org/2000/svg';
const SIZE = 420;
const MARGIN = 40;
const ARM_COLORS = ['#c0392b', '#2c3e50', '#27ae60', '#8e44ad'];

export interface RocArm {
  label: string;
  points: [number, number][];
  auc: number;
}

function svgEl(tag: string): SVGElement {
  return document.createElementNS(SVG_NS, tag) as SVGElement;
}

function x(fpr: number): number {
  return MARGIN + fpr * (SIZE - 2 * MARGIN);
}

function y(tpr: number): number {
  return SIZE - MARGIN - tpr * (SIZE - 2 * MARGIN);
}

export function renderRoc(container: HTMLElement, arms: RocArm[]): void {
  container.replaceChildren();
  const drawable = arms.filter((arm) => arm.points.length >= 2);
  if (drawable.length === 0) {
    const placeholder = document.createElement('p');
    placeholder.className = 'roc-placeholder';
    placeholder.textContent = 'No evaluation data yet.';
    container.append(placeholder);
    return;
  }

  const svg = svgEl('svg');
  svg.setAttribute('viewBox', `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute('class', 'roc-chart');
  svg.setAttribute('role', 'img');

  for (const [axis, coords] of [
    ['x', { x1: x(0), y1: y(0), x2: x(1), y2: y(0) }],
    ['y', { x1: x(0), y1: y(0), x2: x(0), y2: y(1) }],
  ] as const) {
    const line = svgEl('line');
    line.setAttribute('class', `axis axis-${axis}`);
    for (const [k, v] of Object.entries(coords)) line.setAttribute(k, String(v));
    svg.append(line);
  }

  const diagonal = svgEl('line');
  diagonal.setAttribute('class', 'diagonal');
  diagonal.setAttribute('x1', String(x(0)));
  diagonal.setAttribute('y1', String(y(0)));
  diagonal.setAttribute('x2', String(x(1)));
  diagonal.setAttribute('y2', String(y(1)));
  diagonal.setAttribute('stroke-dasharray', '6 4');
  svg.append(diagonal);

  drawable.forEach((arm, i) => {
    const polyline = svgEl('polyline');
    polyline.setAttribute('class', 'curve');
    polyline.setAttribute('data-arm', arm.label);
    polyline.setAttribute('fill', 'none');
    polyline.setAttribute('stroke', ARM_COLORS[i % ARM_COLORS.length]!);
    polyline.setAttribute(
      'points',
      arm.points.map(([fpr, tpr]) => `${x(fpr).toFixed(1)},${y(tpr).toFixed(1)}`).join(' '),
    );
    svg.append(polyline);

    const label = svgEl('text');
    label.setAttribute('class', 'auc-label');
    label.setAttribute('x', String(MARGIN + 8));
    label.setAttribute('y', String(MARGIN + 18 * (i + 1)));
    label.setAttribute('fill', ARM_COLORS[i % ARM_COLORS.length]!);
    label.textContent = `${arm.label}: AUC ${arm.auc.toFixed(3)}`;
    svg.append(label);
  });

  container.append(svg);
}
