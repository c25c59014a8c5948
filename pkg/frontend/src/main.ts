import { ApiClient } from "./api.js";
import { SearchController } from "./controller.js";
import { createView } from "./view.js";

const api = new ApiClient("");
let view: ReturnType<typeof createView> | null = null;
const controller = new SearchController(api, (state) => view?.update(state));
view = createView(document, controller);

const mount = document.getElementById("app");
if (mount) {
  mount.appendChild(view.root);
}
void controller.init();
