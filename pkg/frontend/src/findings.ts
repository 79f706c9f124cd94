/**
 * Findings pane: the server's validation report as a flat list, plus a
 * non-blocking banner slot for transport problems (server down, 409).
 */

import { AnnotationState } from './state';
import type { Finding } from './types';

export function renderFindings(container: HTMLElement, state: AnnotationState): void {
  container.innerHTML = '';
  container.classList.add('findings-pane');

  const dangling = state.danglingAssignments();
  if (dangling.length > 0) {
    const warn = document.createElement('div');
    warn.className = 'finding finding-warning';
    warn.textContent =
      `${dangling.length} assignment(s) reference a deleted region: ` +
      dangling.map((a) => a.node_id).join(', ');
    container.appendChild(warn);
  }

  if (state.report.findings.length === 0 && dangling.length === 0) {
    const ok = document.createElement('div');
    ok.className = 'finding finding-clean';
    ok.textContent = 'No findings';
    container.appendChild(ok);
    return;
  }

  for (const finding of state.report.findings) {
    container.appendChild(renderFinding(finding));
  }
}

function renderFinding(finding: Finding): HTMLElement {
  const el = document.createElement('div');
  el.className = `finding finding-${finding.severity}`;
  el.dataset.code = finding.code;
  el.dataset.subject = finding.subject;
  el.textContent = `${finding.severity.toUpperCase()} ${finding.code} [${finding.subject}]: ${finding.message}`;
  return el;
}

export function showBanner(container: HTMLElement, message: string): void {
  let banner = container.querySelector<HTMLElement>('.banner');
  if (!banner) {
    banner = document.createElement('div');
    banner.className = 'banner';
    container.prepend(banner);
  }
  banner.textContent = message;
}

export function clearBanner(container: HTMLElement): void {
  container.querySelector('.banner')?.remove();
}
