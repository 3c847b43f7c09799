import { ApiClient, ApiError } from "./api.js";
import { AppView } from "./app.js";
import type { MemberWire, ProjectSummaryWire, Role } from "./types.js";

/**
 * Entry point: a small chrome around AppView. Screen one logs in (the
 * service's reference identity provider accepts any subject), screen two
 * lists projects and creates new ones, screen three is the canvas.
 */

interface BootWindow {
  STAGEBOARD_API?: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

function boot(root: HTMLElement): void {
  const doc = root.ownerDocument;
  const base = (window as BootWindow).STAGEBOARD_API ?? "";
  const client = new ApiClient(base);
  let subject = "";
  let view: AppView | null = null;

  const fail = (target: HTMLElement, err: unknown) => {
    target.textContent =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  };

  const showLogin = () => {
    clear(root);
    const panel = el(doc, "div", "login-panel");
    const title = el(doc, "h1", undefined, "stageboard");
    const subjectInput = el(doc, "input", "login-subject");
    subjectInput.setAttribute("placeholder", "User id");
    const nameInput = el(doc, "input", "login-name");
    nameInput.setAttribute("placeholder", "Display name");
    const button = el(doc, "button", "login-button", "Sign in");
    const error = el(doc, "p", "login-error");
    button.addEventListener("click", async () => {
      try {
        const out = await client.login(subjectInput.value.trim(), nameInput.value.trim());
        subject = out.subject;
        await showProjects();
      } catch (err) {
        fail(error, err);
      }
    });
    panel.append(title, subjectInput, nameInput, button, error);
    root.append(panel);
  };

  const showProjects = async () => {
    clear(root);
    const panel = el(doc, "div", "projects-panel");
    const title = el(doc, "h1", undefined, "Projects");
    const list = el(doc, "ul", "project-list");
    const error = el(doc, "p", "projects-error");
    let projects: ProjectSummaryWire[] = [];
    try {
      projects = await client.listProjects();
    } catch (err) {
      fail(error, err);
    }
    for (const project of projects) {
      const item = el(doc, "li", "project-item");
      const open = el(doc, "button", "project-open", `${project.name} (${project.phase})`);
      open.addEventListener("click", () => {
        void showCanvas(project.project_id);
      });
      item.append(open);
      list.append(item);
    }

    const form = el(doc, "div", "project-create");
    const nameInput = el(doc, "input", "project-name-input");
    nameInput.setAttribute("placeholder", "Project name");
    const membersInput = el(doc, "textarea", "project-members-input");
    membersInput.value = `${subject}:Me:Technical`;
    membersInput.setAttribute(
      "placeholder",
      "One member per line: id:Display Name:Technical|NonTechnical",
    );
    const scenarioInput = el(doc, "input", "project-scenario-input");
    scenarioInput.setAttribute("placeholder", "Scenario id (optional)");
    const create = el(doc, "button", "project-create-button", "Create project");
    create.addEventListener("click", async () => {
      try {
        const members: MemberWire[] = membersInput.value
          .split("\n")
          .map((line) => line.trim())
          .filter((line) => line.length > 0)
          .map((line) => {
            const [memberId, displayName, role] = line.split(":");
            return {
              member_id: memberId,
              display_name: displayName ?? memberId,
              role: (role ?? "Technical") as Role,
            };
          });
        const state = await client.createProject(
          nameInput.value.trim(),
          members,
          scenarioInput.value.trim() || null,
        );
        await showCanvas(state.project_id);
      } catch (err) {
        fail(error, err);
      }
    });
    form.append(nameInput, membersInput, scenarioInput, create);
    panel.append(title, list, form, error);
    root.append(panel);
  };

  const showCanvas = async (projectId: string) => {
    clear(root);
    const back = el(doc, "button", "back-button", "All projects");
    back.addEventListener("click", () => {
      view?.close();
      view = null;
      void showProjects();
    });
    const host = el(doc, "div", "canvas-host");
    root.append(back, host);
    view = new AppView(host, client, { subject });
    await view.open(projectId);
  };

  showLogin();
}

const appRoot = document.getElementById("app");
if (appRoot) boot(appRoot);
